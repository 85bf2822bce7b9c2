#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "pilot_borrow/random.hpp"

namespace pilot_borrow {

/// Raised when an argument lies outside the domain of an operation.
class DomainError : public std::invalid_argument {
   public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// A natural-log-scale magnitude. Used for marginal likelihoods and Beta
/// normalizers that overflow or underflow in linear space.
struct LogValue {
    double value = 0.0;

    double exp() const;
    friend bool operator==(const LogValue&, const LogValue&) = default;
};

LogValue log_gamma(double x);

/// ln B(a, b) = ln Γ(a) + ln Γ(b) − ln Γ(a + b).
LogValue log_beta_fn(double a, double b);

/// Regularized incomplete beta function I_x(a, b).
///
/// Evaluated with a modified-Lentz continued fraction, switching to
/// 1 − I_{1−x}(b, a) for x > (a + 1) / (a + b + 2) where the fraction
/// converges slowly.
double reg_inc_beta(double x, double a, double b);

/// Same as reg_inc_beta with ln B(a, b) supplied by the caller; used by inner
/// quadrature loops that evaluate many x for one (a, b).
double reg_inc_beta(double x, double a, double b, LogValue log_beta_ab);

/// ln of the Beta(a, b) density at x, -inf outside the support.
double log_beta_pdf(double x, double a, double b, LogValue log_beta_ab);

namespace detail {
// Variants taking ln x and ln(1 − x) precomputed, for quadrature loops that
// evaluate a density and a CDF at the same node. Require 0 < x < 1.
double reg_inc_beta_at(double x, double log_x, double log1m_x, double a, double b, LogValue log_beta_ab);
double log_beta_pdf_at(double log_x, double log1m_x, double a, double b, LogValue log_beta_ab);
}  // namespace detail

/// ln[ C(n, y) B(a + y, b + n − y) / B(a, b) ], the marginal likelihood of
/// y successes in n trials under a Beta(a, b) prior.
LogValue log_beta_binomial_pmf(std::int64_t y, std::int64_t n, double a, double b);

/// ln C(n, k).
double log_choose(std::int64_t n, std::int64_t k);

/// Binomial(n, p) draw by inversion with a single uniform. Small means are
/// inverted sequentially from zero; otherwise the search alternates outward
/// from the mode, so the expected work is O(sqrt(n p (1 − p))) and every draw
/// consumes exactly one value from the stream.
std::int64_t sample_binomial(std::int64_t n, double p, RandomStream& rng);

}  // namespace pilot_borrow
