#pragma once

#include <span>

#include "pilot_borrow/map_prior.hpp"

namespace pilot_borrow {

/// Declare superiority when the posterior probability strictly exceeds phi.
struct DecisionRule {
    double phi = 0.975;

    explicit DecisionRule(double threshold = 0.975);
};

/// Gauss-Legendre rule on [-1, 1]. Tables are built once per order and shared.
struct QuadratureRule {
    std::span<const double> nodes;
    std::span<const double> weights;
};
QuadratureRule gauss_legendre(int order);

/// Interval outside which a Beta density is below e^-46 of its peak.
/// Covers the whole unit interval when either shape is below 1.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};
Interval effective_support(const BetaParams& b);

/// P(X > Y) for independent X ~ Beta(t), Y ~ Beta(c), as
/// ∫ pdf_X(x) I_x(c) dx with Gauss-Legendre order escalated 64 → 128 → 256
/// until successive orders agree within 1e-9.
double beta_exceedance(const BetaParams& t, const BetaParams& c);

/// P(p_T > p_C) for independent mixture posteriors: the weighted sum of
/// beta_exceedance over all component pairs.
double superiority_probability(const BetaMixture& treatment, const BetaMixture& control);

bool decide(double probability, const DecisionRule& rule);

}  // namespace pilot_borrow
