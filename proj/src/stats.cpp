#include "pilot_borrow/stats.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace pilot_borrow {

namespace {

constexpr int kMaxFractionTerms = 100000;
constexpr double kFractionEps = 1e-16;
constexpr double kTiny = 1e-300;

template <class... Args>
[[noreturn]] void domain_error(Args&&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    throw DomainError(os.str());
}

// Continued fraction for I_x(a, b) (modified Lentz).
double beta_fraction(double x, double a, double b) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxFractionTerms; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kFractionEps) break;
    }
    return h;
}

}  // namespace

double LogValue::exp() const { return std::exp(value); }

LogValue log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) domain_error("log_gamma: argument must be positive, got ", x);
    int sign = 0;
    return {::lgamma_r(x, &sign)};
}

LogValue log_beta_fn(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) domain_error("log_beta_fn: arguments must be positive, got (", a, ", ", b, ")");
    // Floating-point addition commutes, so (a, b) and (b, a) give identical bits.
    const double la = log_gamma(a).value;
    const double lb = log_gamma(b).value;
    return {(la + lb) - log_gamma(a + b).value};
}

double reg_inc_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) domain_error("reg_inc_beta: shape parameters must be positive");
    return reg_inc_beta(x, a, b, log_beta_fn(a, b));
}

double reg_inc_beta(double x, double a, double b, LogValue log_beta_ab) {
    if (!(x >= 0.0 && x <= 1.0)) domain_error("reg_inc_beta: x must lie in [0, 1], got ", x);
    if (!(a > 0.0) || !(b > 0.0)) domain_error("reg_inc_beta: shape parameters must be positive");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    return detail::reg_inc_beta_at(x, std::log(x), std::log1p(-x), a, b, log_beta_ab);
}

double detail::reg_inc_beta_at(double x, double log_x, double log1m_x, double a, double b, LogValue log_beta_ab) {
    const double log_front = a * log_x + b * log1m_x - log_beta_ab.value;
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return std::exp(log_front) * beta_fraction(x, a, b) / a;
    }
    return 1.0 - std::exp(log_front) * beta_fraction(1.0 - x, b, a) / b;
}

double detail::log_beta_pdf_at(double log_x, double log1m_x, double a, double b, LogValue log_beta_ab) {
    const double left = (a == 1.0) ? 0.0 : (a - 1.0) * log_x;
    const double right = (b == 1.0) ? 0.0 : (b - 1.0) * log1m_x;
    return left + right - log_beta_ab.value;
}

double log_beta_pdf(double x, double a, double b, LogValue log_beta_ab) {
    if (x < 0.0 || x > 1.0) return -std::numeric_limits<double>::infinity();
    const double left = (a == 1.0) ? 0.0 : (a - 1.0) * std::log(x);
    const double right = (b == 1.0) ? 0.0 : (b - 1.0) * std::log1p(-x);
    return left + right - log_beta_ab.value;
}

double log_choose(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) domain_error("log_choose: need 0 <= k <= n, got k=", k, " n=", n);
    if (k == 0 || k == n) return 0.0;
    return log_gamma(static_cast<double>(n) + 1.0).value - log_gamma(static_cast<double>(k) + 1.0).value -
           log_gamma(static_cast<double>(n - k) + 1.0).value;
}

LogValue log_beta_binomial_pmf(std::int64_t y, std::int64_t n, double a, double b) {
    if (n < 0 || y < 0 || y > n) domain_error("log_beta_binomial_pmf: need 0 <= y <= n, got y=", y, " n=", n);
    if (!(a > 0.0) || !(b > 0.0)) domain_error("log_beta_binomial_pmf: shape parameters must be positive");
    if (n == 0) return {0.0};
    const double yd = static_cast<double>(y);
    const double fd = static_cast<double>(n - y);
    return {log_choose(n, y) + log_beta_fn(a + yd, b + fd).value - log_beta_fn(a, b).value};
}

std::int64_t sample_binomial(std::int64_t n, double p, RandomStream& rng) {
    if (n < 0) domain_error("sample_binomial: n must be nonnegative, got ", n);
    if (!(p >= 0.0 && p <= 1.0)) domain_error("sample_binomial: p must lie in [0, 1], got ", p);
    double u = rng.uniform();
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;

    const bool flipped = p > 0.5;
    const double q = flipped ? 1.0 - p : p;
    const double odds = q / (1.0 - q);
    const double nd = static_cast<double>(n);
    std::int64_t k = 0;

    if (nd * q < 10.0) {
        double pmf = std::exp(nd * std::log1p(-q));
        while (u > pmf && k < n) {
            u -= pmf;
            pmf *= odds * static_cast<double>(n - k) / static_cast<double>(k + 1);
            ++k;
        }
    } else {
        const auto mode = static_cast<std::int64_t>(std::floor((nd + 1.0) * q));
        const double pmf_mode = std::exp(log_choose(n, mode) + static_cast<double>(mode) * std::log(q) +
                                         static_cast<double>(n - mode) * std::log1p(-q));
        k = mode;
        u -= pmf_mode;
        std::int64_t lo = mode;
        std::int64_t hi = mode;
        double pmf_lo = pmf_mode;
        double pmf_hi = pmf_mode;
        while (u > 0.0 && (lo > 0 || hi < n)) {
            if (lo > 0) {
                pmf_lo *= static_cast<double>(lo) / (odds * static_cast<double>(n - lo + 1));
                --lo;
                u -= pmf_lo;
                if (u <= 0.0) {
                    k = lo;
                    break;
                }
            }
            if (hi < n) {
                pmf_hi *= odds * static_cast<double>(n - hi) / static_cast<double>(hi + 1);
                ++hi;
                u -= pmf_hi;
                if (u <= 0.0) {
                    k = hi;
                    break;
                }
            }
        }
    }
    return flipped ? n - k : k;
}

}  // namespace pilot_borrow
