// Command-line driver: single power estimates, full design grids, conflict
// sweeps, and the duration / recruitment arithmetic.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "pilot_borrow/feasibility.hpp"
#include "pilot_borrow/scenario_io.hpp"
#include "pilot_borrow/trial_sim.hpp"

namespace pb = pilot_borrow;

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kIo = 2, kFlagged = 3 };

constexpr const char* kSeedEnv = "PILOT_BORROW_SEED";

struct Common {
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> replicates;
    std::string workers = "1";
    std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--seed", c.seed, "Master seed (overrides config and " + std::string(kSeedEnv) + ")");
    cmd->add_option("--replicates", c.replicates, "Replicates per power estimate");
    cmd->add_option("--workers", c.workers, "Worker threads, or 'auto'")->capture_default_str();
    cmd->add_option("--out", c.out, "CSV output path");
}

int parse_workers(const std::string& text) {
    if (text == "auto") return 0;
    try {
        std::size_t used = 0;
        const int n = std::stoi(text, &used);
        if (used == text.size() && n >= 1) return n;
    } catch (const std::exception&) {
    }
    throw pb::ConfigValidationError("--workers", "expected a positive integer or 'auto'");
}

std::uint64_t resolve_seed(const Common& c, std::uint64_t fallback) {
    if (c.seed) return *c.seed;
    if (const char* env = std::getenv(kSeedEnv); env && *env) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used);
            if (used == std::string(env).size()) return v;
        } catch (const std::exception&) {
        }
        throw pb::ConfigValidationError(kSeedEnv, "expected an unsigned 64-bit integer");
    }
    return fallback;
}

struct CellArgs {
    double p_control = 0.25;
    double rr = 1.7;
    double multiplier = 1.0;
    double pilot_fraction = 0.0;
    double phi = 0.975;
    double weight = 0.5;
};

void add_cell(CLI::App* cmd, CellArgs& a, bool with_multiplier = true) {
    cmd->add_option("--p-c", a.p_control, "Control success probability")->capture_default_str();
    cmd->add_option("--rr", a.rr, "Risk ratio in the definitive trial")->capture_default_str();
    if (with_multiplier) {
        cmd->add_option("--multiplier", a.multiplier, "Pilot risk-ratio multiplier")->capture_default_str();
    }
    cmd->add_option("--pilot-fraction", a.pilot_fraction, "Pilot size as a fraction of the definitive size")
        ->capture_default_str();
    cmd->add_option("--phi", a.phi, "Posterior probability threshold")->capture_default_str();
    cmd->add_option("--w", a.weight, "Initial weight on the informative component")->capture_default_str();
}

pb::DesignScenario make_scenario(const CellArgs& a, const Common& c) {
    return pb::DesignScenario::make(a.p_control, a.rr, a.multiplier, a.pilot_fraction, a.phi, a.weight,
                                    c.replicates.value_or(pb::kDefaultReplicates), resolve_seed(c, pb::kDefaultSeed));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw pb::OutputError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_mixture(const char* label, const pb::BetaMixture& m) {
    std::printf("  %s:", label);
    for (const auto& c : m.components()) {
        std::printf("  %.6g x Beta(%g, %g)", c.weight, c.params.alpha, c.params.beta);
    }
    std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Operating characteristics of two-arm binary trials that borrow pilot data through robust mixture priors"};
    app.require_subcommand(1);

    Common common;
    CellArgs power_cell;
    CellArgs conflict_cell;
    CellArgs replicate_cell;

    // power
    auto* power = app.add_subcommand("power", "Estimate power for one design cell at one sample size");
    std::int64_t power_n = 0;
    add_cell(power, power_cell);
    add_common(power, common);
    power->add_option("--n", power_n, "Definitive total sample size")->required();

    // grid
    auto* grid = app.add_subcommand("grid", "Run a scenario grid from a JSON config and write CSV");
    std::string config_path;
    grid->add_option("--config", config_path, "JSON run configuration")->required();
    add_common(grid, common);

    // conflict
    auto* conflict = app.add_subcommand("conflict", "Minimal sample size across pilot risk-ratio multipliers");
    std::vector<double> multipliers{0.80, 0.85, 0.90, 0.95, 1.0};
    double target = 0.80;
    std::int64_t n_lo = 20, n_hi = 10000;
    conflict_cell.pilot_fraction = 0.2;
    add_cell(conflict, conflict_cell, false);
    add_common(conflict, common);
    conflict->add_option("--multipliers", multipliers, "Pilot risk-ratio multipliers")->capture_default_str();
    conflict->add_option("--target", target, "Target power")->capture_default_str();
    conflict->add_option("--n-lo", n_lo, "Smallest even total to search")->capture_default_str();
    conflict->add_option("--n-hi", n_hi, "Largest even total to search")->capture_default_str();

    // duration
    auto* duration = app.add_subcommand("duration", "Expected duration n / rate in months");
    std::vector<std::int64_t> duration_n;
    std::vector<double> rates{2.0, 5.0, 10.0};
    bool per_arm = false;
    duration->add_option("--n", duration_n, "Total sample sizes")->required();
    duration->add_option("--rate", rates, "Recruitment rates per month")->capture_default_str();
    duration->add_flag("--per-arm", per_arm, "Rates are per arm rather than for the whole trial");

    // recruit
    auto* recruit = app.add_subcommand("recruit", "Probability of reaching n recruits within m months");
    double lambda0 = 5.0;
    std::int64_t recruit_n = 0;
    std::vector<double> months;
    std::optional<double> recruit_target;
    recruit->add_option("--lambda0", lambda0, "Pilot-observed recruits per month")->capture_default_str();
    recruit->add_option("--n", recruit_n, "Required recruits")->required();
    recruit->add_option("--months", months, "Trial durations in months");
    recruit->add_option("--target", recruit_target, "Report the months needed to reach this probability");

    // replicate
    auto* replicate = app.add_subcommand("replicate", "Run one replicate and print every intermediate");
    std::int64_t rep_n = 0;
    std::int64_t rep_index = 0;
    add_cell(replicate, replicate_cell);
    replicate->add_option("--n", rep_n, "Definitive total sample size")->required();
    replicate->add_option("--index", rep_index, "Replicate index")->capture_default_str();
    replicate->add_option("--seed", common.seed, "Master seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (*power) {
            const auto s = make_scenario(power_cell, common);
            const auto est = pb::estimate_power(s, power_n, parse_workers(common.workers));
            std::printf("n_total=%lld power=%.4f se=%.4f replicates=%lld seed=%llu\n",
                        static_cast<long long>(est.n_total), est.power, est.standard_error,
                        static_cast<long long>(est.replicates), static_cast<unsigned long long>(s.master_seed));
            return kOk;
        }

        if (*grid) {
            auto cfg = pb::parse_config(read_file(config_path));
            cfg.master_seed = resolve_seed(common, cfg.master_seed);
            if (common.replicates) cfg.replicates = *common.replicates;
            if (grid->count("--workers")) cfg.workers = parse_workers(common.workers);
            if (!common.out.empty()) cfg.output_path = common.out;
            for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';

            const auto table = pb::run_grid(cfg, [](std::size_t done, std::size_t total, const pb::ResultRow& row) {
                std::cerr << "[" << done << "/" << total << "] p_C=" << row.cell.p_control << " rr=" << row.cell.rr
                          << " c=" << row.cell.rr_pilot_multiplier << " f=" << row.cell.pilot_fraction << " -> "
                          << pb::to_string(row.status);
                if (row.status != pb::RowStatus::infeasible) std::cerr << " n=" << row.n_total;
                std::cerr << '\n';
            });
            pb::emit_results(table, cfg.output_path, std::cout);
            for (const auto& r : table.rows) {
                if (r.status != pb::RowStatus::ok) return kFlagged;
            }
            return kOk;
        }

        if (*conflict) {
            auto base = make_scenario(conflict_cell, common);
            const int workers = parse_workers(common.workers);
            const auto results = pb::run_conflict_grid(base, multipliers, target, n_lo, n_hi, workers);

            pb::ResultTable table;
            table.duration_columns = {"duration_rate2", "duration_rate5", "duration_rate10"};
            bool flagged = false;
            for (std::size_t i = 0; i < results.size(); ++i) {
                const auto& res = results[i];
                pb::ResultRow row;
                row.cell = {conflict_cell.p_control, conflict_cell.rr, multipliers[i], conflict_cell.pilot_fraction};
                row.n_total = res.n_total;
                row.pilot_total = res.pilot_total;
                row.power = res.power_at_n.power;
                row.power_se = res.power_at_n.standard_error;
                row.replicates = base.replicates;
                row.seed = base.master_seed;
                row.status = res.status == pb::SearchStatus::found ? pb::RowStatus::ok : pb::RowStatus::unreachable;
                flagged |= row.status != pb::RowStatus::ok;
                if (row.status == pb::RowStatus::ok) pb::attach_feasibility(row, pb::RecruitmentConfig{});
                table.rows.push_back(row);
            }
            if (common.out.empty()) {
                std::cout << pb::format_summary(table);
            } else {
                pb::emit_results(table, common.out, std::cout);
            }
            return flagged ? kFlagged : kOk;
        }

        if (*duration) {
            const auto basis = per_arm ? pb::RateBasis::per_arm : pb::RateBasis::total;
            std::printf("%8s %8s %12s %8s\n", "n", "rate", "months", "display");
            for (auto n : duration_n) {
                for (double r : rates) {
                    const double m = pb::duration_for(n, r, basis);
                    std::printf("%8lld %8g %12.4f %8lld\n", static_cast<long long>(n), r, m,
                                static_cast<long long>(pb::display_months(m)));
                }
            }
            return kOk;
        }

        if (*recruit) {
            const auto model = pb::RecruitmentModel::from_pilot_rate(lambda0);
            if (recruit_target) {
                const double m = pb::months_for_probability(model, recruit_n, *recruit_target);
                std::printf("lambda0=%g n=%lld target=%g months=%.2f\n", lambda0, static_cast<long long>(recruit_n),
                            *recruit_target, m);
            }
            for (double m : months) {
                const auto nb = pb::negbin_params(model, m);
                std::printf("lambda0=%g n=%lld months=%g r=%g p=%.6g P(N>=n)=%.6f\n", lambda0,
                            static_cast<long long>(recruit_n), m, nb.r, nb.p,
                            pb::recruitment_probability(model, recruit_n, m));
            }
            if (!recruit_target && months.empty()) {
                throw pb::ConfigValidationError("recruit", "give --months and/or --target");
            }
            return kOk;
        }

        if (*replicate) {
            const auto s = make_scenario(replicate_cell, common);
            auto rng = pb::replicate_stream(s.master_seed, rep_n, rep_index);
            const auto tr = pb::trace_replicate(s, rep_n, rng);
            std::printf("scenario: p_C=%g p_T=%g pilot p_T=%g f=%g n_total=%lld seed=%llu index=%lld\n", s.p_control,
                        s.p_treatment(), s.p_treatment_pilot(), s.pilot_fraction, static_cast<long long>(rep_n),
                        static_cast<unsigned long long>(s.master_seed), static_cast<long long>(rep_index));
            std::printf("pilot draws: control %lld/%lld  treatment %lld/%lld\n",
                        static_cast<long long>(tr.pilot_control.successes), static_cast<long long>(tr.pilot_control.size),
                        static_cast<long long>(tr.pilot_treatment.successes),
                        static_cast<long long>(tr.pilot_treatment.size));
            std::printf("priors:\n");
            print_mixture("control  ", tr.prior_control);
            print_mixture("treatment", tr.prior_treatment);
            std::printf("definitive draws: control %lld/%lld  treatment %lld/%lld\n",
                        static_cast<long long>(tr.definitive_control.successes),
                        static_cast<long long>(tr.definitive_control.size),
                        static_cast<long long>(tr.definitive_treatment.successes),
                        static_cast<long long>(tr.definitive_treatment.size));
            std::printf("posteriors:\n");
            print_mixture("control  ", tr.posterior_control);
            print_mixture("treatment", tr.posterior_treatment);
            std::printf("updated informative weight: control %.6f  treatment %.6f\n",
                        pb::informative_weight(tr.posterior_control), pb::informative_weight(tr.posterior_treatment));
            std::printf("P(p_T > p_C | data) = %.8f\n", tr.superiority);
            std::printf("decision (> %g): %s\n", s.phi, tr.success ? "superior" : "not superior");
            return kOk;
        }
    } catch (const pb::ConfigParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const pb::ConfigValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const pb::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const pb::OutputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    }
    return kOk;
}
