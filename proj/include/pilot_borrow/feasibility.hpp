#pragma once

#include <cstdint>

namespace pilot_borrow {

/// Gamma(2·λ0, 2) uncertainty over the monthly recruitment rate, centred on
/// the pilot-observed rate λ0 with variance λ0 / 2.
struct RecruitmentModel {
    double lambda0 = 1.0;
    double gamma_shape = 2.0;
    double gamma_rate = 2.0;

    static RecruitmentModel from_pilot_rate(double lambda0);

    double prior_mean() const { return gamma_shape / gamma_rate; }
    double prior_variance() const { return gamma_shape / (gamma_rate * gamma_rate); }
};

/// Whether recruitment rates and recruit counts refer to the whole trial or
/// to one arm.
enum class RateBasis { total, per_arm };

/// n / λ months.
double expected_duration(std::int64_t n, double lambda);

/// Nearest whole month, halves away from zero. Presentation only.
std::int64_t display_months(double months);

struct NegBinParams {
    double r = 1.0;
    double p = 0.5;
};

/// Parameters of the Negative Binomial count of recruits in m months:
/// r = 2·λ0, p = 2 / (2 + m).
NegBinParams negbin_params(const RecruitmentModel& model, double months);

/// P(N >= n) for N ~ NegBin(r, p), via the identity P(N >= n) = I_{1−p}(n, r).
double recruitment_probability(const RecruitmentModel& model, std::int64_t n, double months);

/// Smallest m on a 0.01-month grid with recruitment_probability >= target.
double months_for_probability(const RecruitmentModel& model, std::int64_t n, double target);

/// Duration of a trial of n_total participants at the given rate.
double duration_for(std::int64_t n_total, double rate, RateBasis basis);

/// Recruit count that must be reached: the total, or the larger arm.
std::int64_t recruitment_target(std::int64_t n_total, RateBasis basis);

}  // namespace pilot_borrow
