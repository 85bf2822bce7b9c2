#include "pilot_borrow/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace pilot_borrow {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) throw ConfigValidationError(where.empty() ? key : where + "." + key, "unknown key");
    }
}

double number_at(const json& v, const std::string& field) {
    if (!v.is_number()) throw ConfigValidationError(field, "expected a number");
    return v.get<double>();
}

std::int64_t integer_at(const json& v, const std::string& field) {
    if (!v.is_number_integer()) throw ConfigValidationError(field, "expected an integer");
    return v.get<std::int64_t>();
}

std::vector<double> number_list(const json& v, const std::string& field) {
    if (!v.is_array()) throw ConfigValidationError(field, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number_at(v[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ConfigValidationError(field, what);
}

void check_cell(const ScenarioCell& c, const std::string& where) {
    require(c.p_control > 0.0 && c.p_control < 1.0, where + "p_C", "must lie in (0, 1)");
    require(c.rr > 0.0 && std::isfinite(c.rr), where + "rr", "must be positive");
    require(c.rr_pilot_multiplier > 0.0 && std::isfinite(c.rr_pilot_multiplier), where + "rr_pilot_multiplier",
            "must be positive");
    require(c.pilot_fraction >= 0.0 && c.pilot_fraction < 1.0, where + "pilot_fraction", "must lie in [0, 1)");
}

std::vector<ScenarioCell> expand_cross_product(const json& s) {
    reject_unknown(s, {"p_C", "rr", "pilot_fraction", "conflict_multipliers", "conflict_pilot_fraction"}, "scenarios");
    require(s.contains("p_C"), "scenarios.p_C", "required");
    require(s.contains("rr"), "scenarios.rr", "required");
    const auto pcs = number_list(s["p_C"], "scenarios.p_C");
    const auto rrs = number_list(s["rr"], "scenarios.rr");
    const auto fractions = s.contains("pilot_fraction") ? number_list(s["pilot_fraction"], "scenarios.pilot_fraction")
                                                        : std::vector<double>{0.0};
    const auto multipliers = s.contains("conflict_multipliers")
                                 ? number_list(s["conflict_multipliers"], "scenarios.conflict_multipliers")
                                 : std::vector<double>{};
    const double conflict_fraction = s.contains("conflict_pilot_fraction")
                                         ? number_at(s["conflict_pilot_fraction"], "scenarios.conflict_pilot_fraction")
                                         : 0.2;

    std::vector<ScenarioCell> cells;
    for (double pc : pcs) {
        for (double rr : rrs) {
            for (double f : fractions) cells.push_back({pc, rr, 1.0, f});
            for (double c : multipliers) cells.push_back({pc, rr, c, conflict_fraction});
        }
    }
    return cells;
}

std::vector<ScenarioCell> explicit_cells(const json& arr) {
    std::vector<ScenarioCell> cells;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string where = "scenarios[" + std::to_string(i) + "]";
        const auto& obj = arr[i];
        require(obj.is_object(), where, "expected an object");
        reject_unknown(obj, {"p_C", "rr", "pilot_fraction", "rr_pilot_multiplier"}, where);
        require(obj.contains("p_C"), where + ".p_C", "required");
        require(obj.contains("rr"), where + ".rr", "required");
        ScenarioCell c;
        c.p_control = number_at(obj["p_C"], where + ".p_C");
        c.rr = number_at(obj["rr"], where + ".rr");
        if (obj.contains("pilot_fraction")) c.pilot_fraction = number_at(obj["pilot_fraction"], where + ".pilot_fraction");
        if (obj.contains("rr_pilot_multiplier")) {
            c.rr_pilot_multiplier = number_at(obj["rr_pilot_multiplier"], where + ".rr_pilot_multiplier");
        }
        cells.push_back(c);
    }
    return cells;
}

std::pair<std::size_t, std::size_t> line_and_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

DesignScenario RunConfig::scenario_for(const ScenarioCell& cell) const {
    DesignScenario s;
    s.p_control = cell.p_control;
    s.rr = cell.rr;
    s.rr_pilot_multiplier = cell.rr_pilot_multiplier;
    s.pilot_fraction = cell.pilot_fraction;
    s.phi = phi;
    s.prior_weight = prior_weight;
    s.replicates = replicates;
    s.master_seed = master_seed;
    return s;
}

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, column] = line_and_column(text, e.byte);
        throw ConfigParseError("malformed config at line " + std::to_string(line) + ", column " +
                                   std::to_string(column) + ": " + e.what(),
                               line, column);
    }
    require(doc.is_object(), "<root>", "expected a JSON object");
    reject_unknown(doc,
                   {"scenarios", "target_power", "phi", "prior_weight", "replicates", "master_seed", "workers",
                    "output_path", "search", "recruitment"},
                   "");

    RunConfig cfg;
    require(doc.contains("scenarios"), "scenarios", "required");
    const auto& sc = doc["scenarios"];
    if (sc.is_object()) {
        cfg.scenarios = expand_cross_product(sc);
    } else if (sc.is_array()) {
        cfg.scenarios = explicit_cells(sc);
    } else {
        throw ConfigValidationError("scenarios", "expected an object of lists or an array of cells");
    }

    if (doc.contains("target_power")) cfg.target_power = number_at(doc["target_power"], "target_power");
    require(cfg.target_power > 0.0 && cfg.target_power < 1.0, "target_power", "must lie in (0, 1)");
    if (doc.contains("phi")) cfg.phi = number_at(doc["phi"], "phi");
    require(cfg.phi > 0.0 && cfg.phi < 1.0, "phi", "must lie in (0, 1)");
    if (doc.contains("prior_weight")) cfg.prior_weight = number_at(doc["prior_weight"], "prior_weight");
    require(cfg.prior_weight >= 0.0 && cfg.prior_weight <= 1.0, "prior_weight", "must lie in [0, 1]");
    if (doc.contains("replicates")) cfg.replicates = integer_at(doc["replicates"], "replicates");
    require(cfg.replicates >= 1, "replicates", "must be at least 1");
    if (doc.contains("master_seed")) {
        const auto& s = doc["master_seed"];
        require(s.is_number_unsigned(), "master_seed", "expected a nonnegative 64-bit integer");
        cfg.master_seed = s.get<std::uint64_t>();
    }
    if (doc.contains("workers")) {
        const auto& w = doc["workers"];
        if (w.is_string()) {
            require(w.get<std::string>() == "auto", "workers", "expected a positive integer or \"auto\"");
            cfg.workers = 0;
        } else {
            const auto n = integer_at(w, "workers");
            require(n >= 1 && n <= 4096, "workers", "expected a positive integer or \"auto\"");
            cfg.workers = static_cast<int>(n);
        }
    }
    if (doc.contains("output_path")) {
        require(doc["output_path"].is_string(), "output_path", "expected a string");
        cfg.output_path = doc["output_path"].get<std::string>();
    }
    if (doc.contains("search")) {
        const auto& s = doc["search"];
        require(s.is_object(), "search", "expected an object");
        reject_unknown(s, {"n_lo", "n_hi"}, "search");
        if (s.contains("n_lo")) cfg.n_lo = integer_at(s["n_lo"], "search.n_lo");
        if (s.contains("n_hi")) cfg.n_hi = integer_at(s["n_hi"], "search.n_hi");
    }
    require(cfg.n_lo >= 2 && cfg.n_lo % 2 == 0, "search.n_lo", "must be even and at least 2");
    require(cfg.n_hi > cfg.n_lo && cfg.n_hi % 2 == 0, "search.n_hi", "must be even and above n_lo");

    if (doc.contains("recruitment")) {
        const auto& r = doc["recruitment"];
        require(r.is_object(), "recruitment", "expected an object");
        reject_unknown(r, {"duration_rates", "lambda0", "months", "rate_basis"}, "recruitment");
        auto& rc = cfg.recruitment;
        if (r.contains("duration_rates")) rc.duration_rates = number_list(r["duration_rates"], "recruitment.duration_rates");
        if (r.contains("lambda0")) rc.lambda0 = number_list(r["lambda0"], "recruitment.lambda0");
        if (r.contains("months")) rc.months = number_list(r["months"], "recruitment.months");
        if (r.contains("rate_basis")) {
            const auto& b = r["rate_basis"];
            require(b.is_string(), "recruitment.rate_basis", "expected \"total\" or \"per_arm\"");
            const auto name = b.get<std::string>();
            require(name == "total" || name == "per_arm", "recruitment.rate_basis", "expected \"total\" or \"per_arm\"");
            rc.basis = name == "total" ? RateBasis::total : RateBasis::per_arm;
        }
        for (double v : rc.duration_rates) require(v > 0.0, "recruitment.duration_rates", "rates must be positive");
        for (double v : rc.lambda0) require(v > 0.0, "recruitment.lambda0", "rates must be positive");
        for (double v : rc.months) require(v > 0.0, "recruitment.months", "durations must be positive");
    }

    for (std::size_t i = 0; i < cfg.scenarios.size(); ++i) {
        const auto& cell = cfg.scenarios[i];
        check_cell(cell, "scenarios[" + std::to_string(i) + "].");
        if (auto reason = cfg.scenario_for(cell).invalid_reason()) {
            cfg.warnings.push_back("scenarios[" + std::to_string(i) + "]: " + *reason);
        }
    }
    return cfg;
}

std::string to_json(const RunConfig& cfg) {
    ordered_json doc;
    ordered_json cells = ordered_json::array();
    for (const auto& c : cfg.scenarios) {
        cells.push_back({{"p_C", c.p_control},
                         {"rr", c.rr},
                         {"rr_pilot_multiplier", c.rr_pilot_multiplier},
                         {"pilot_fraction", c.pilot_fraction}});
    }
    doc["scenarios"] = cells;
    doc["target_power"] = cfg.target_power;
    doc["phi"] = cfg.phi;
    doc["prior_weight"] = cfg.prior_weight;
    doc["replicates"] = cfg.replicates;
    doc["master_seed"] = cfg.master_seed;
    if (cfg.workers == 0) {
        doc["workers"] = "auto";
    } else {
        doc["workers"] = cfg.workers;
    }
    doc["output_path"] = cfg.output_path;
    doc["search"] = {{"n_lo", cfg.n_lo}, {"n_hi", cfg.n_hi}};
    doc["recruitment"] = {{"duration_rates", cfg.recruitment.duration_rates},
                          {"lambda0", cfg.recruitment.lambda0},
                          {"months", cfg.recruitment.months},
                          {"rate_basis", cfg.recruitment.basis == RateBasis::total ? "total" : "per_arm"}};
    return doc.dump(2) + "\n";
}

const char* to_string(RowStatus status) {
    switch (status) {
        case RowStatus::ok:
            return "ok";
        case RowStatus::infeasible:
            return "infeasible";
        case RowStatus::unreachable:
            return "unreachable";
    }
    return "?";
}

ResultTable make_table(const RunConfig& config) {
    ResultTable t;
    for (double r : config.recruitment.duration_rates) t.duration_columns.push_back("duration_rate" + format_number(r));
    for (double l : config.recruitment.lambda0) {
        for (double m : config.recruitment.months) {
            t.recruit_columns.push_back("recruit_prob_l" + format_number(l) + "_m" + format_number(m));
        }
    }
    return t;
}

void attach_feasibility(ResultRow& row, const RecruitmentConfig& rc) {
    row.durations.clear();
    row.recruit_probabilities.clear();
    for (double rate : rc.duration_rates) row.durations.push_back(duration_for(row.n_total, rate, rc.basis));
    const auto target = recruitment_target(row.n_total, rc.basis);
    for (double l : rc.lambda0) {
        const auto model = RecruitmentModel::from_pilot_rate(l);
        for (double m : rc.months) row.recruit_probabilities.push_back(recruitment_probability(model, target, m));
    }
}

ResultTable run_grid(const RunConfig& config, const GridProgress& progress) {
    auto table = make_table(config);
    table.rows.reserve(config.scenarios.size());
    for (const auto& cell : config.scenarios) {
        ResultRow row;
        row.cell = cell;
        row.seed = config.master_seed;
        row.replicates = config.replicates;
        const auto scenario = config.scenario_for(cell);
        if (auto reason = scenario.invalid_reason()) {
            row.status = RowStatus::infeasible;
            row.note = *reason;
        } else {
            const auto res = find_min_sample_size(scenario, config.target_power, config.n_lo, config.n_hi,
                                                  config.workers);
            row.n_total = res.n_total;
            row.pilot_total = res.pilot_total;
            row.power = res.power_at_n.power;
            row.power_se = res.power_at_n.standard_error;
            if (res.status == SearchStatus::found) {
                row.status = RowStatus::ok;
                attach_feasibility(row, config.recruitment);
            } else {
                row.status = RowStatus::unreachable;
                row.note = "target power unreachable up to n_hi = " + std::to_string(config.n_hi);
            }
        }
        table.rows.push_back(row);
        if (progress) progress(table.rows.size(), config.scenarios.size(), table.rows.back());
    }
    return table;
}

std::string format_csv(const ResultTable& table) {
    std::ostringstream os;
    os << "p_C,rr,rr_pilot_multiplier,pilot_fraction,n_total,pilot_total,power,power_se,replicates";
    for (const auto& c : table.duration_columns) os << ',' << csv_field(c);
    for (const auto& c : table.recruit_columns) os << ',' << csv_field(c);
    os << ",status,seed\n";

    for (const auto& r : table.rows) {
        os << format_number(r.cell.p_control) << ',' << format_number(r.cell.rr) << ','
           << format_number(r.cell.rr_pilot_multiplier) << ',' << format_number(r.cell.pilot_fraction);
        const bool numbers = r.status != RowStatus::infeasible;
        if (numbers) {
            os << ',' << r.n_total << ',' << r.pilot_total << ',' << format_number(r.power) << ','
               << fixed(r.power_se, 6) << ',' << r.replicates;
        } else {
            os << ",,,,," << r.replicates;
        }
        for (std::size_t i = 0; i < table.duration_columns.size(); ++i) {
            os << ',';
            if (i < r.durations.size()) os << format_number(r.durations[i]);
        }
        for (std::size_t i = 0; i < table.recruit_columns.size(); ++i) {
            os << ',';
            if (i < r.recruit_probabilities.size()) os << fixed(r.recruit_probabilities[i], 6);
        }
        os << ',' << to_string(r.status) << ',' << r.seed << '\n';
    }
    return os.str();
}

std::string format_summary(const ResultTable& table) {
    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof line, "%6s %5s %6s %5s %7s %6s %8s  %-11s", "p_C", "rr", "c", "f", "n", "pilot",
                  "power", "status");
    os << line;
    for (const auto& c : table.duration_columns) os << ' ' << c.substr(std::string("duration_").size());
    os << '\n';
    for (const auto& r : table.rows) {
        if (r.status == RowStatus::infeasible) {
            std::snprintf(line, sizeof line, "%6.3g %5.3g %6.3g %5.3g %7s %6s %8s  %-11s", r.cell.p_control, r.cell.rr,
                          r.cell.rr_pilot_multiplier, r.cell.pilot_fraction, "-", "-", "-", to_string(r.status));
        } else {
            std::snprintf(line, sizeof line, "%6.3g %5.3g %6.3g %5.3g %7lld %6lld %8.4f  %-11s", r.cell.p_control,
                          r.cell.rr, r.cell.rr_pilot_multiplier, r.cell.pilot_fraction,
                          static_cast<long long>(r.n_total), static_cast<long long>(r.pilot_total), r.power,
                          to_string(r.status));
        }
        os << line;
        for (double d : r.durations) os << ' ' << display_months(d);
        os << '\n';
    }
    return os.str();
}

void emit_results(const ResultTable& table, const std::string& path, std::ostream& out) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw OutputError("cannot open output file '" + path + "' for writing");
    file << format_csv(table);
    file.flush();
    if (!file) throw OutputError("failed writing output file '" + path + "'");
    out << format_summary(table);
}

}  // namespace pilot_borrow
