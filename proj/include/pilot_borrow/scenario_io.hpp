#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pilot_borrow/feasibility.hpp"
#include "pilot_borrow/trial_sim.hpp"

namespace pilot_borrow {

/// Malformed JSON. Carries the 1-based line and column of the failure.
class ConfigParseError : public std::runtime_error {
   public:
    ConfigParseError(const std::string& what, std::size_t line, std::size_t column)
        : std::runtime_error(what), line_(line), column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

   private:
    std::size_t line_;
    std::size_t column_;
};

/// Well-formed JSON with an invalid or unknown field.
class ConfigValidationError : public std::runtime_error {
   public:
    ConfigValidationError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

   private:
    std::string field_;
};

class OutputError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// One grid cell before validation against probability bounds.
struct ScenarioCell {
    double p_control = 0.25;
    double rr = 1.0;
    double rr_pilot_multiplier = 1.0;
    double pilot_fraction = 0.0;

    friend bool operator==(const ScenarioCell&, const ScenarioCell&) = default;
};

struct RecruitmentConfig {
    std::vector<double> duration_rates{2.0, 5.0, 10.0};
    std::vector<double> lambda0;
    std::vector<double> months;
    RateBasis basis = RateBasis::total;

    friend bool operator==(const RecruitmentConfig&, const RecruitmentConfig&) = default;
};

struct RunConfig {
    std::vector<ScenarioCell> scenarios;
    double target_power = 0.80;
    double phi = 0.975;
    double prior_weight = 0.5;
    std::int64_t replicates = kDefaultReplicates;
    std::uint64_t master_seed = kDefaultSeed;
    int workers = 1;  // 0 selects the hardware concurrency
    std::string output_path = "results.csv";
    std::int64_t n_lo = 20;
    std::int64_t n_hi = 10000;
    RecruitmentConfig recruitment;
    std::vector<std::string> warnings;  // infeasible cells, in scenario order

    DesignScenario scenario_for(const ScenarioCell& cell) const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses and validates a JSON run configuration, applying defaults.
///
/// `scenarios` is either an object of lists expanded as a cross product
/// (p_C × rr × pilot_fraction, then p_C × rr × conflict_multipliers at
/// conflict_pilot_fraction) or an explicit array of cells. Unknown keys are
/// rejected. Cells whose treatment probability exceeds 1 stay in the list
/// and produce a warning.
RunConfig parse_config(const std::string& text);

/// Canonical JSON for a config: explicit scenario array, every default spelled out.
std::string to_json(const RunConfig& config);

enum class RowStatus { ok, infeasible, unreachable };
const char* to_string(RowStatus status);

struct ResultRow {
    ScenarioCell cell;
    RowStatus status = RowStatus::ok;
    std::int64_t n_total = 0;
    std::int64_t pilot_total = 0;
    double power = 0.0;
    double power_se = 0.0;
    std::int64_t replicates = 0;
    std::vector<double> durations;              // one per duration rate
    std::vector<double> recruit_probabilities;  // one per (lambda0, months) pair, lambda0-major
    std::uint64_t seed = 0;
    std::string note;
};

struct ResultTable {
    std::vector<std::string> duration_columns;
    std::vector<std::string> recruit_columns;
    std::vector<ResultRow> rows;
};

/// Empty table with the column layout implied by the config.
ResultTable make_table(const RunConfig& config);

/// Fills the duration and recruitment columns of a row from its n_total.
void attach_feasibility(ResultRow& row, const RecruitmentConfig& recruitment);

using GridProgress = std::function<void(std::size_t done, std::size_t total, const ResultRow& row)>;

/// One row per expanded cell, in config order. Per-cell failures are recorded
/// in the row status; the grid always completes.
ResultTable run_grid(const RunConfig& config, const GridProgress& progress = {});

/// CSV text: header plus one line per row, LF endings, RFC 4180 quoting.
std::string format_csv(const ResultTable& table);

/// Fixed-width summary for terminals.
std::string format_summary(const ResultTable& table);

/// Writes format_csv to path and format_summary to out. Throws OutputError.
void emit_results(const ResultTable& table, const std::string& path, std::ostream& out);

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double value);

}  // namespace pilot_borrow
