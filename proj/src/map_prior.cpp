#include "pilot_borrow/map_prior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pilot_borrow {

void ArmCounts::validate() const {
    if (size < 0 || successes < 0 || successes > size) {
        throw DomainError("arm counts need 0 <= successes <= size, got " + std::to_string(successes) + " of " +
                          std::to_string(size));
    }
}

void BetaParams::validate() const {
    if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
        throw DomainError("Beta parameters must be positive and finite");
    }
}

BetaMixture::BetaMixture(std::vector<MixtureComponent> components) : components_(std::move(components)) {
    if (components_.empty()) throw DomainError("mixture needs at least one component");
    double total = 0.0;
    for (const auto& c : components_) {
        if (!(c.weight >= 0.0 && c.weight <= 1.0)) throw DomainError("mixture weight outside [0, 1]");
        c.params.validate();
        total += c.weight;
    }
    if (std::fabs(total - 1.0) > 1e-12) throw DomainError("mixture weights must sum to 1");
}

double BetaMixture::mean() const {
    double m = 0.0;
    for (const auto& c : components_) m += c.weight * c.params.mean();
    return m;
}

double BetaMixture::density(double p) const {
    double d = 0.0;
    for (const auto& c : components_) {
        if (c.weight == 0.0) continue;
        const auto lb = log_beta_fn(c.params.alpha, c.params.beta);
        d += c.weight * std::exp(log_beta_pdf(p, c.params.alpha, c.params.beta, lb));
    }
    return d;
}

double BetaMixture::log_density(double p) const {
    double hi = -std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    terms.reserve(components_.size());
    for (const auto& c : components_) {
        const auto lb = log_beta_fn(c.params.alpha, c.params.beta);
        const double t = std::log(c.weight) + log_beta_pdf(p, c.params.alpha, c.params.beta, lb);
        terms.push_back(t);
        hi = std::max(hi, t);
    }
    if (!std::isfinite(hi)) return hi;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - hi);
    return hi + std::log(s);
}

BetaMixture build_robust_map(const ArmCounts& pilot, double w, double a0, double b0, BetaParams vague) {
    pilot.validate();
    if (!(w >= 0.0 && w <= 1.0)) throw DomainError("prior weight must lie in [0, 1]");
    BetaParams{a0, b0}.validate();
    const BetaParams informative{a0 + static_cast<double>(pilot.successes),
                                 b0 + static_cast<double>(pilot.size - pilot.successes)};
    informative.validate();
    return BetaMixture({{1.0 - w, vague}, {w, informative}});
}

std::vector<LogValue> component_log_marginals(const BetaMixture& prior, const ArmCounts& data) {
    data.validate();
    std::vector<LogValue> out;
    out.reserve(prior.size());
    for (const auto& c : prior.components()) {
        out.push_back(log_beta_binomial_pmf(data.successes, data.size, c.params.alpha, c.params.beta));
    }
    return out;
}

BetaMixture update_posterior(const BetaMixture& prior, const ArmCounts& data) {
    data.validate();
    if (data.size == 0) return prior;

    const auto marginals = component_log_marginals(prior, data);
    const auto y = static_cast<double>(data.successes);
    const auto f = static_cast<double>(data.size - data.successes);

    // Reweight in log space, shifted by the largest term.
    std::vector<double> log_w(prior.size());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < prior.size(); ++i) {
        log_w[i] = prior[i].weight > 0.0 ? std::log(prior[i].weight) + marginals[i].value
                                         : -std::numeric_limits<double>::infinity();
        top = std::max(top, log_w[i]);
    }
    double total = 0.0;
    for (auto& lw : log_w) {
        lw = std::exp(lw - top);
        total += lw;
    }

    std::vector<MixtureComponent> post;
    post.reserve(prior.size());
    for (std::size_t i = 0; i < prior.size(); ++i) {
        const auto& p = prior[i].params;
        post.push_back({log_w[i] / total, {p.alpha + y, p.beta + f}});
    }
    return BetaMixture(std::move(post));
}

double informative_weight(const BetaMixture& mixture) {
    if (mixture.size() != 2) {
        throw DomainError("informative_weight expects a two-component mixture, got " +
                          std::to_string(mixture.size()));
    }
    return mixture[BetaMixture::kInformative].weight;
}

}  // namespace pilot_borrow
