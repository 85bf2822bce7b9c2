#include "pilot_borrow/feasibility.hpp"

#include <cmath>
#include <string>

#include "pilot_borrow/stats.hpp"
#include "pilot_borrow/trial_sim.hpp"

namespace pilot_borrow {

namespace {
constexpr double kMonthStep = 0.01;
}

RecruitmentModel RecruitmentModel::from_pilot_rate(double lambda0) {
    if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) {
        throw DomainError("pilot recruitment rate must be positive, got " + std::to_string(lambda0));
    }
    return {lambda0, 2.0 * lambda0, 2.0};
}

double expected_duration(std::int64_t n, double lambda) {
    if (n < 0) throw DomainError("expected_duration: n must be nonnegative");
    if (!(lambda > 0.0)) throw DomainError("expected_duration: rate must be positive");
    return static_cast<double>(n) / lambda;
}

std::int64_t display_months(double months) { return std::llround(months); }

NegBinParams negbin_params(const RecruitmentModel& model, double months) {
    if (!(months > 0.0)) throw DomainError("negbin_params: duration must be positive");
    return {model.gamma_shape, model.gamma_rate / (model.gamma_rate + months)};
}

double recruitment_probability(const RecruitmentModel& model, std::int64_t n, double months) {
    if (n < 0) throw DomainError("recruitment_probability: n must be nonnegative");
    const auto nb = negbin_params(model, months);
    if (n == 0) return 1.0;
    return reg_inc_beta(1.0 - nb.p, static_cast<double>(n), nb.r);
}

double months_for_probability(const RecruitmentModel& model, std::int64_t n, double target) {
    if (!(target > 0.0 && target < 1.0)) throw DomainError("months_for_probability: target must lie in (0, 1)");
    auto ok = [&](std::int64_t steps) {
        return recruitment_probability(model, n, kMonthStep * static_cast<double>(steps)) >= target;
    };
    if (ok(1)) return kMonthStep;

    std::int64_t lo = 1;  // fails
    std::int64_t hi = 2;
    while (!ok(hi)) {
        lo = hi;
        hi *= 2;
    }
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        (ok(mid) ? hi : lo) = mid;
    }
    return kMonthStep * static_cast<double>(hi);
}

double duration_for(std::int64_t n_total, double rate, RateBasis basis) {
    return basis == RateBasis::total ? expected_duration(n_total, rate) : expected_duration(n_total, 2.0 * rate);
}

std::int64_t recruitment_target(std::int64_t n_total, RateBasis basis) {
    return basis == RateBasis::total ? n_total : split_arms(n_total).control;
}

}  // namespace pilot_borrow
