#pragma once

#include <cstdint>
#include <vector>

#include "pilot_borrow/stats.hpp"

namespace pilot_borrow {

/// Successes and size for one arm of one study.
struct ArmCounts {
    std::int64_t successes = 0;
    std::int64_t size = 0;

    /// Throws DomainError unless 0 <= successes <= size.
    void validate() const;
    friend bool operator==(const ArmCounts&, const ArmCounts&) = default;
};

struct BetaParams {
    double alpha = 1.0;
    double beta = 1.0;

    void validate() const;
    double mean() const { return alpha / (alpha + beta); }
    friend bool operator==(const BetaParams&, const BetaParams&) = default;
};

struct MixtureComponent {
    double weight = 1.0;
    BetaParams params;
    friend bool operator==(const MixtureComponent&, const MixtureComponent&) = default;
};

/// Weighted Beta mixture over one arm's success probability.
///
/// Mixtures built by build_robust_map have two components: index 0 is the
/// vague component and index 1 the informative one. Other operations accept
/// any number of components.
class BetaMixture {
   public:
    static constexpr std::size_t kVague = 0;
    static constexpr std::size_t kInformative = 1;

    /// Validates weights (each in [0, 1], sum 1 within 1e-12) and parameters.
    explicit BetaMixture(std::vector<MixtureComponent> components);

    const std::vector<MixtureComponent>& components() const { return components_; }
    std::size_t size() const { return components_.size(); }
    const MixtureComponent& operator[](std::size_t i) const { return components_[i]; }

    double mean() const;
    double log_density(double p) const;
    double density(double p) const;

    friend bool operator==(const BetaMixture&, const BetaMixture&) = default;

   private:
    std::vector<MixtureComponent> components_;
};

inline constexpr BetaParams kUniformPrior{1.0, 1.0};

/// Robust prior (1 − w)·vague + w·Beta(a0 + y, b0 + n − y) built from one pilot arm.
BetaMixture build_robust_map(const ArmCounts& pilot, double w = 0.5, double a0 = 1.0, double b0 = 1.0,
                             BetaParams vague = kUniformPrior);

/// Conjugate update of every component, with weights reweighted by each
/// component's beta-binomial marginal likelihood of the new data.
BetaMixture update_posterior(const BetaMixture& prior, const ArmCounts& data);

/// Log marginal likelihood of the data under each component, in component
/// order. Binomial coefficient included.
std::vector<LogValue> component_log_marginals(const BetaMixture& prior, const ArmCounts& data);

/// Weight on the informative component. Requires a two-component mixture.
double informative_weight(const BetaMixture& mixture);

}  // namespace pilot_borrow
