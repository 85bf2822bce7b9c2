#include "pilot_borrow/decision.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace pilot_borrow {

namespace {

constexpr double kLogCut = 46.0;
constexpr double kOrderAgreement = 1e-9;
constexpr std::array<int, 3> kOrders{64, 128, 256};

struct GaussTable {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussTable(int n) : nodes(n), weights(n) {
        const int half = (n + 1) / 2;
        for (int i = 1; i <= half; ++i) {
            double z = std::cos(std::numbers::pi * (i - 0.25) / (n + 0.5));
            double pp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p1 = 1.0;
                double p2 = 0.0;
                for (int j = 1; j <= n; ++j) {
                    const double p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
                }
                pp = n * (z * p1 - p2) / (z * z - 1.0);
                const double prev = z;
                z = prev - p1 / pp;
                if (std::fabs(z - prev) < 1e-15) break;
            }
            nodes[i - 1] = -z;
            nodes[n - i] = z;
            weights[i - 1] = weights[n - i] = 2.0 / ((1.0 - z * z) * pp * pp);
        }
    }
};

const GaussTable& table_for(int order) {
    static const GaussTable t64(64);
    static const GaussTable t128(128);
    static const GaussTable t256(256);
    switch (order) {
        case 64:
            return t64;
        case 128:
            return t128;
        case 256:
            return t256;
        default:
            throw DomainError("unsupported Gauss-Legendre order " + std::to_string(order));
    }
}

// Component with its normalizer and support cached for repeated evaluation.
struct PreparedBeta {
    double weight;
    BetaParams params;
    LogValue log_norm;
    Interval support;

    PreparedBeta(double w, const BetaParams& p)
        : weight(w), params(p), log_norm(log_beta_fn(p.alpha, p.beta)), support(effective_support(p)) {}
};

// Drops components whose weight cannot move the result and merges identical
// parameter sets (an empty pilot yields two identical components).
std::vector<PreparedBeta> prepare(const BetaMixture& m) {
    std::vector<PreparedBeta> out;
    out.reserve(m.size());
    for (const auto& c : m.components()) {
        if (c.weight < 1e-16) continue;
        auto same = std::find_if(out.begin(), out.end(), [&](const PreparedBeta& p) { return p.params == c.params; });
        if (same != out.end()) {
            same->weight += c.weight;
        } else {
            out.emplace_back(c.weight, c.params);
        }
    }
    return out;
}

double integrate(std::span<const PreparedBeta> ts, std::span<const PreparedBeta> cs, double lo, double hi,
                 int order) {
    const auto& tab = table_for(order);
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double sum = 0.0;
    for (std::size_t k = 0; k < tab.nodes.size(); ++k) {
        const double x = mid + half * tab.nodes[k];
        if (!(x > 0.0 && x < 1.0)) continue;
        const double log_x = std::log(x);
        const double log1m_x = std::log1p(-x);
        double density = 0.0;
        for (const auto& t : ts) {
            const double lp = detail::log_beta_pdf_at(log_x, log1m_x, t.params.alpha, t.params.beta, t.log_norm);
            if (lp > -700.0) density += t.weight * std::exp(lp);
        }
        if (density == 0.0) continue;
        double cdf = 0.0;
        for (const auto& c : cs) {
            if (x <= c.support.lo) continue;
            cdf += c.weight * (x >= c.support.hi
                                   ? 1.0
                                   : detail::reg_inc_beta_at(x, log_x, log1m_x, c.params.alpha, c.params.beta,
                                                             c.log_norm));
        }
        sum += tab.weights[k] * density * cdf;
    }
    return half * sum;
}

// P(X > Y) for X drawn from the treatment components and Y from the control
// components: ∫ f_T(x) F_C(x) dx over the overlap of the effective supports,
// plus the treatment mass above the overlap where F_C is 1.
double exceedance(std::span<const PreparedBeta> ts, std::span<const PreparedBeta> cs) {
    Interval t_span{1.0, 0.0};
    Interval c_span{1.0, 0.0};
    for (const auto& t : ts) {
        t_span.lo = std::min(t_span.lo, t.support.lo);
        t_span.hi = std::max(t_span.hi, t.support.hi);
    }
    for (const auto& c : cs) {
        c_span.lo = std::min(c_span.lo, c.support.lo);
        c_span.hi = std::max(c_span.hi, c.support.hi);
    }
    const double lo = std::max(t_span.lo, c_span.lo);
    const double hi = std::min(t_span.hi, c_span.hi);
    if (lo >= hi) {
        // Supports do not overlap: X sits entirely above or below Y.
        return c_span.hi <= t_span.lo ? 1.0 : 0.0;
    }

    double upper_tail = 0.0;
    if (hi < 1.0) {
        for (const auto& t : ts) upper_tail += t.weight * reg_inc_beta(1.0 - hi, t.params.beta, t.params.alpha, t.log_norm);
    }

    double previous = integrate(ts, cs, lo, hi, kOrders[0]);
    double current = previous;
    for (std::size_t i = 1; i < kOrders.size(); ++i) {
        current = integrate(ts, cs, lo, hi, kOrders[i]);
        if (std::fabs(current - previous) <= kOrderAgreement) break;
        previous = current;
    }
    return std::clamp(current + upper_tail, 0.0, 1.0);
}

}  // namespace

DecisionRule::DecisionRule(double threshold) : phi(threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) throw DomainError("decision threshold phi must lie in (0, 1)");
}

QuadratureRule gauss_legendre(int order) {
    const auto& t = table_for(order);
    return {t.nodes, t.weights};
}

Interval effective_support(const BetaParams& b) {
    b.validate();
    const double a = b.alpha;
    const double bb = b.beta;
    if (a < 1.0 || bb < 1.0 || a + bb <= 2.0) return {0.0, 1.0};

    // Shapes >= 1 give a log-concave density, so the level set is an interval.
    const auto lb = log_beta_fn(a, bb);
    const double mode = (a - 1.0) / (a + bb - 2.0);
    const double cut = log_beta_pdf(mode, a, bb, lb) - kLogCut;
    auto below = [&](double x) { return log_beta_pdf(x, a, bb, lb) < cut; };

    Interval out;
    if (below(0.0)) {
        double l = 0.0, r = mode;
        for (int i = 0; i < 60; ++i) {
            const double m = 0.5 * (l + r);
            (below(m) ? l : r) = m;
        }
        out.lo = l;
    }
    if (below(1.0)) {
        double l = mode, r = 1.0;
        for (int i = 0; i < 60; ++i) {
            const double m = 0.5 * (l + r);
            (below(m) ? r : l) = m;
        }
        out.hi = r;
    }
    return out;
}

double beta_exceedance(const BetaParams& t, const BetaParams& c) {
    const PreparedBeta tp(1.0, t);
    const PreparedBeta cp(1.0, c);
    return exceedance({&tp, 1}, {&cp, 1});
}

double superiority_probability(const BetaMixture& treatment, const BetaMixture& control) {
    // Σ_i Σ_j w_i w_j P(X_i > Y_j) = ∫ f_T(x) F_C(x) dx, evaluated as one integral.
    const auto ts = prepare(treatment);
    const auto cs = prepare(control);
    return exceedance(ts, cs);
}

bool decide(double probability, const DecisionRule& rule) {
    if (!(probability >= 0.0 && probability <= 1.0)) throw DomainError("probability must lie in [0, 1]");
    return probability > rule.phi;
}

}  // namespace pilot_borrow
