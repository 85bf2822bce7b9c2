#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pilot_borrow/decision.hpp"
#include "pilot_borrow/map_prior.hpp"
#include "pilot_borrow/random.hpp"

namespace pilot_borrow {

inline constexpr std::uint64_t kDefaultSeed = 20240917;
inline constexpr std::int64_t kDefaultReplicates = 10000;

/// One cell of the simulation design. Construct through make() to validate.
struct DesignScenario {
    double p_control = 0.25;
    double rr = 1.0;                   // p_T = rr * p_C in the definitive trial
    double rr_pilot_multiplier = 1.0;  // pilot p_T = multiplier * rr * p_C
    double pilot_fraction = 0.0;       // pilot size relative to the definitive size
    double phi = 0.975;
    double prior_weight = 0.5;
    std::int64_t replicates = kDefaultReplicates;
    std::uint64_t master_seed = kDefaultSeed;

    static DesignScenario make(double p_control, double rr, double rr_pilot_multiplier = 1.0,
                               double pilot_fraction = 0.0, double phi = 0.975, double prior_weight = 0.5,
                               std::int64_t replicates = kDefaultReplicates,
                               std::uint64_t master_seed = kDefaultSeed);

    /// Empty when valid, otherwise the reason the cell is rejected.
    std::optional<std::string> invalid_reason() const;

    double p_treatment() const { return rr * p_control; }
    double p_treatment_pilot() const { return rr_pilot_multiplier * rr * p_control; }

    friend bool operator==(const DesignScenario&, const DesignScenario&) = default;
};

struct PowerEstimate {
    double power = 0.0;
    double standard_error = 0.0;
    std::int64_t replicates = 0;
    std::int64_t n_total = 0;
};

enum class SearchStatus { found, unreachable };

/// One power evaluation made during a sample-size search.
struct ProbeRecord {
    std::int64_t n_total = 0;
    double power = 0.0;
    std::int64_t replicates = 0;  // fewer than the scenario's when screening settled the probe
    bool passed = false;
};

struct SampleSizeResult {
    SearchStatus status = SearchStatus::found;
    std::int64_t n_total = 0;      // definitive size; n_hi when unreachable
    std::int64_t pilot_total = 0;  // nearest-integer(pilot_fraction * n_total)
    PowerEstimate power_at_n;      // re-estimated with an independent seed
    std::vector<ProbeRecord> probes;  // search path, in probe order
};

struct ArmSplit {
    std::int64_t control = 0;
    std::int64_t treatment = 0;
    friend bool operator==(const ArmSplit&, const ArmSplit&) = default;
};

/// 1:1 allocation; an odd participant goes to control.
ArmSplit split_arms(std::int64_t total);

/// Pilot size for a definitive size, rounded half away from zero.
std::int64_t pilot_total_for(double pilot_fraction, std::int64_t n_total);

/// Every intermediate of one replicate, for debugging and tests.
struct ReplicateTrace {
    ArmCounts pilot_control, pilot_treatment;
    BetaMixture prior_control{{{1.0, kUniformPrior}}};
    BetaMixture prior_treatment{{{1.0, kUniformPrior}}};
    ArmCounts definitive_control, definitive_treatment;
    BetaMixture posterior_control{{{1.0, kUniformPrior}}};
    BetaMixture posterior_treatment{{{1.0, kUniformPrior}}};
    double superiority = 0.0;
    bool success = false;
};

/// Stream for one replicate, keyed on (master seed, definitive size, index).
RandomStream replicate_stream(std::uint64_t master_seed, std::int64_t n_total, std::int64_t index);

ReplicateTrace trace_replicate(const DesignScenario& scenario, std::int64_t n_total, RandomStream& rng);

/// Pilot draws, robust priors, definitive draws, posterior update, decision.
bool simulate_replicate(const DesignScenario& scenario, std::int64_t n_total, RandomStream& rng);

/// Fraction of successful replicates. Results are identical for any worker
/// count; workers <= 0 selects the hardware concurrency.
PowerEstimate estimate_power(const DesignScenario& scenario, std::int64_t n_total, int workers = 1);

/// Successes among replicates [first, last) of estimate_power's sequence.
std::int64_t count_successes(const DesignScenario& scenario, std::int64_t n_total, std::int64_t first,
                             std::int64_t last, int workers = 1);

/// Smallest even n in [n_lo, n_hi] with estimated power >= target_power.
///
/// Geometric expansion from n_lo brackets the target, then bisection over
/// even totals narrows it. Every probe uses the scenario's master seed so
/// probes share their replicate keying; the chosen n is re-estimated with an
/// independent seed for the reported power.
///
/// Each probe first runs the leading tenth of its replicates (when the
/// scenario has at least 5000). If that estimate sits more than five
/// standard errors from the target the probe is settled there; otherwise
/// the remaining replicates run and the full estimate decides. A full
/// estimate equals estimate_power at the same n.
SampleSizeResult find_min_sample_size(const DesignScenario& scenario, double target_power = 0.80,
                                      std::int64_t n_lo = 20, std::int64_t n_hi = 10000, int workers = 1);

/// One search per pilot-RR multiplier, in input order.
std::vector<SampleSizeResult> run_conflict_grid(const DesignScenario& base, const std::vector<double>& multipliers,
                                                double target_power = 0.80, std::int64_t n_lo = 20,
                                                std::int64_t n_hi = 10000, int workers = 1);

/// Seed used to re-verify a search result, independent of the probe seed.
std::uint64_t verification_seed(std::uint64_t master_seed);

}  // namespace pilot_borrow
