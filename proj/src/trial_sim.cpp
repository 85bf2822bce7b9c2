#include "pilot_borrow/trial_sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

namespace pilot_borrow {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

std::int64_t even_floor(std::int64_t n) { return n - (n % 2); }

constexpr std::int64_t kScreenMinReplicates = 5000;
constexpr double kScreenSigmas = 5.0;

}  // namespace

DesignScenario DesignScenario::make(double p_control, double rr, double rr_pilot_multiplier, double pilot_fraction,
                                    double phi, double prior_weight, std::int64_t replicates,
                                    std::uint64_t master_seed) {
    DesignScenario s{p_control, rr, rr_pilot_multiplier, pilot_fraction, phi, prior_weight, replicates, master_seed};
    if (auto reason = s.invalid_reason()) throw DomainError(*reason);
    return s;
}

std::optional<std::string> DesignScenario::invalid_reason() const {
    std::ostringstream os;
    if (!(p_control > 0.0 && p_control < 1.0)) {
        os << "p_C must lie in (0, 1), got " << p_control;
    } else if (!(rr > 0.0) || !std::isfinite(rr)) {
        os << "rr must be positive, got " << rr;
    } else if (!(rr_pilot_multiplier > 0.0) || !std::isfinite(rr_pilot_multiplier)) {
        os << "rr_pilot_multiplier must be positive, got " << rr_pilot_multiplier;
    } else if (p_treatment() > 1.0) {
        os << "infeasible cell: rr * p_C = " << p_treatment() << " exceeds 1";
    } else if (p_treatment_pilot() > 1.0) {
        os << "infeasible cell: pilot rr * p_C = " << p_treatment_pilot() << " exceeds 1";
    } else if (!(pilot_fraction >= 0.0 && pilot_fraction < 1.0)) {
        os << "pilot_fraction must lie in [0, 1), got " << pilot_fraction;
    } else if (!(phi > 0.0 && phi < 1.0)) {
        os << "phi must lie in (0, 1), got " << phi;
    } else if (!is_probability(prior_weight)) {
        os << "prior weight must lie in [0, 1], got " << prior_weight;
    } else if (replicates < 1) {
        os << "replicates must be positive, got " << replicates;
    } else {
        return std::nullopt;
    }
    return os.str();
}

ArmSplit split_arms(std::int64_t total) {
    if (total < 0) throw DomainError("split_arms: total must be nonnegative");
    return {total - total / 2, total / 2};
}

std::int64_t pilot_total_for(double pilot_fraction, std::int64_t n_total) {
    return std::llround(pilot_fraction * static_cast<double>(n_total));
}

RandomStream replicate_stream(std::uint64_t master_seed, std::int64_t n_total, std::int64_t index) {
    return RandomStream(derive_seed(master_seed, static_cast<std::uint64_t>(n_total), static_cast<std::uint64_t>(index)));
}

std::uint64_t verification_seed(std::uint64_t master_seed) { return mix64(master_seed ^ 0x7665726966793a31ULL); }

ReplicateTrace trace_replicate(const DesignScenario& scenario, std::int64_t n_total, RandomStream& rng) {
    if (n_total < 2) throw DomainError("definitive size must be at least 2");
    ReplicateTrace tr;

    const auto pilot = split_arms(pilot_total_for(scenario.pilot_fraction, n_total));
    tr.pilot_control = {sample_binomial(pilot.control, scenario.p_control, rng), pilot.control};
    tr.pilot_treatment = {sample_binomial(pilot.treatment, scenario.p_treatment_pilot(), rng), pilot.treatment};
    tr.prior_control = build_robust_map(tr.pilot_control, scenario.prior_weight);
    tr.prior_treatment = build_robust_map(tr.pilot_treatment, scenario.prior_weight);

    const auto arms = split_arms(n_total);
    tr.definitive_control = {sample_binomial(arms.control, scenario.p_control, rng), arms.control};
    tr.definitive_treatment = {sample_binomial(arms.treatment, scenario.p_treatment(), rng), arms.treatment};
    tr.posterior_control = update_posterior(tr.prior_control, tr.definitive_control);
    tr.posterior_treatment = update_posterior(tr.prior_treatment, tr.definitive_treatment);

    tr.superiority = superiority_probability(tr.posterior_treatment, tr.posterior_control);
    tr.success = decide(tr.superiority, DecisionRule(scenario.phi));
    return tr;
}

bool simulate_replicate(const DesignScenario& scenario, std::int64_t n_total, RandomStream& rng) {
    return trace_replicate(scenario, n_total, rng).success;
}

std::int64_t count_successes(const DesignScenario& scenario, std::int64_t n_total, std::int64_t first,
                             std::int64_t last, int workers) {
    if (auto reason = scenario.invalid_reason()) throw DomainError(*reason);
    if (n_total < 2) throw DomainError("definitive size must be at least 2");
    if (first < 0 || last < first) throw DomainError("replicate range is empty or negative");

    const std::int64_t count = last - first;
    if (count == 0) return 0;
    if (workers <= 0) workers = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
    workers = static_cast<int>(std::min<std::int64_t>(workers, count));

    // Replicate i always runs on its own stream, so the total is independent
    // of how indices are dealt out to workers.
    auto run_slice = [&](int slot) {
        std::int64_t hits = 0;
        for (std::int64_t i = first + slot; i < last; i += workers) {
            auto rng = replicate_stream(scenario.master_seed, n_total, i);
            hits += simulate_replicate(scenario, n_total, rng) ? 1 : 0;
        }
        return hits;
    };

    if (workers == 1) return run_slice(0);

    std::vector<std::int64_t> partial(workers, 0);
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    partial[w] = run_slice(w);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::int64_t successes = 0;
    for (auto p : partial) successes += p;
    return successes;
}

namespace {

PowerEstimate make_estimate(std::int64_t successes, std::int64_t reps, std::int64_t n_total) {
    PowerEstimate est;
    est.replicates = reps;
    est.n_total = n_total;
    est.power = static_cast<double>(successes) / static_cast<double>(reps);
    est.standard_error = std::sqrt(est.power * (1.0 - est.power) / static_cast<double>(reps));
    return est;
}

}  // namespace

PowerEstimate estimate_power(const DesignScenario& scenario, std::int64_t n_total, int workers) {
    const auto successes = count_successes(scenario, n_total, 0, scenario.replicates, workers);
    return make_estimate(successes, scenario.replicates, n_total);
}

SampleSizeResult find_min_sample_size(const DesignScenario& scenario, double target_power, std::int64_t n_lo,
                                      std::int64_t n_hi, int workers) {
    if (auto reason = scenario.invalid_reason()) throw DomainError(*reason);
    if (!(target_power > 0.0 && target_power < 1.0)) throw DomainError("target_power must lie in (0, 1)");
    if (n_lo < 2 || n_lo % 2 != 0 || n_hi % 2 != 0 || n_lo >= n_hi) {
        throw DomainError("search range needs even 2 <= n_lo < n_hi");
    }

    const std::int64_t reps = scenario.replicates;
    const std::int64_t screen = reps >= kScreenMinReplicates ? reps / 10 : 0;
    const double screen_se = screen > 0 ? std::sqrt(target_power * (1.0 - target_power) / static_cast<double>(screen)) : 0.0;

    SampleSizeResult result;
    std::map<std::int64_t, bool> seen;
    auto passes = [&](std::int64_t n) {
        if (auto it = seen.find(n); it != seen.end()) return it->second;
        ProbeRecord probe{n, 0.0, reps, false};
        std::int64_t hits = 0;
        if (screen > 0) {
            hits = count_successes(scenario, n, 0, screen, workers);
            const double early = static_cast<double>(hits) / static_cast<double>(screen);
            if (std::fabs(early - target_power) > kScreenSigmas * screen_se) {
                probe.power = early;
                probe.replicates = screen;
            }
        }
        if (probe.replicates == reps) {
            hits += count_successes(scenario, n, screen, reps, workers);
            probe.power = static_cast<double>(hits) / static_cast<double>(reps);
        }
        probe.passed = probe.power >= target_power;
        result.probes.push_back(probe);
        return seen[n] = probe.passed;
    };

    auto finish = [&](std::int64_t n, SearchStatus status) {
        auto verify = scenario;
        verify.master_seed = verification_seed(scenario.master_seed);
        result.status = status;
        result.n_total = n;
        result.pilot_total = pilot_total_for(scenario.pilot_fraction, n);
        result.power_at_n = estimate_power(verify, n, workers);
        return result;
    };

    if (passes(n_lo)) return finish(n_lo, SearchStatus::found);

    std::int64_t lo = n_lo;  // known to fail
    std::int64_t hi = n_hi;
    for (;;) {
        const std::int64_t next = std::min(n_hi, even_floor(2 * lo));
        if (passes(next)) {
            hi = next;
            break;
        }
        if (next == n_hi) return finish(n_hi, SearchStatus::unreachable);
        lo = next;
    }

    while (hi - lo > 2) {
        const std::int64_t mid = even_floor(lo + (hi - lo) / 2);
        (passes(mid) ? hi : lo) = mid;
    }
    return finish(hi, SearchStatus::found);
}

std::vector<SampleSizeResult> run_conflict_grid(const DesignScenario& base, const std::vector<double>& multipliers,
                                                double target_power, std::int64_t n_lo, std::int64_t n_hi,
                                                int workers) {
    std::vector<SampleSizeResult> out;
    out.reserve(multipliers.size());
    for (double c : multipliers) {
        auto s = base;
        s.rr_pilot_multiplier = c;
        out.push_back(find_min_sample_size(s, target_power, n_lo, n_hi, workers));
    }
    return out;
}

}  // namespace pilot_borrow
