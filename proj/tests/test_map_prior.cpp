#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pilot_borrow/map_prior.hpp"

using namespace pilot_borrow;

namespace {

double oracle_weight(const BetaMixture& prior, const ArmCounts& data) {
    const auto& vague = prior[BetaMixture::kVague].params;
    const auto& inf = prior[BetaMixture::kInformative].params;
    return oracle::updated_weight(prior[BetaMixture::kInformative].weight,
                                  oracle::log_marginal(data.successes, data.size, inf.alpha, inf.beta),
                                  oracle::log_marginal(data.successes, data.size, vague.alpha, vague.beta));
}

}  // namespace

TEST_CASE("build_robust_map examples") {
    const auto m = build_robust_map({5, 20});
    REQUIRE(m.size() == 2);
    CHECK(m[0] == MixtureComponent{0.5, {1, 1}});
    CHECK(m[1] == MixtureComponent{0.5, {6, 16}});

    const auto empty = build_robust_map({0, 0});
    CHECK(empty[0] == MixtureComponent{0.5, {1, 1}});
    CHECK(empty[1] == MixtureComponent{0.5, {1, 1}});

    const auto all = build_robust_map({20, 20});
    CHECK(all[1] == MixtureComponent{0.5, {21, 1}});

    const auto tilted = build_robust_map({3, 9}, 0.25, 2.0, 0.5);
    CHECK(tilted[0] == MixtureComponent{0.75, kUniformPrior});
    CHECK(tilted[1] == MixtureComponent{0.25, {5.0, 6.5}});
}

TEST_CASE("build_robust_map rejects invalid input") {
    CHECK_THROWS_AS(build_robust_map({21, 20}), DomainError);
    CHECK_THROWS_AS(build_robust_map({-1, 20}), DomainError);
    CHECK_THROWS_AS(build_robust_map({1, 20}, 1.2), DomainError);
    CHECK_THROWS_AS(build_robust_map({1, 20}, 0.5, 0.0), DomainError);
}

TEST_CASE("BetaMixture validation") {
    CHECK_THROWS_AS(BetaMixture(std::vector<MixtureComponent>{}), DomainError);
    CHECK_THROWS_AS(BetaMixture(std::vector<MixtureComponent>{{0.6, {1, 1}}, {0.6, {2, 2}}}), DomainError);
    CHECK_THROWS_AS(BetaMixture(std::vector<MixtureComponent>{{-0.1, {1, 1}}, {1.1, {2, 2}}}), DomainError);
    CHECK_THROWS_AS(BetaMixture(std::vector<MixtureComponent>{{1.0, {0, 1}}}), DomainError);
    CHECK_NOTHROW(BetaMixture(std::vector<MixtureComponent>{{0.3, {1, 1}}, {0.7, {2, 2}}}));
}

TEST_CASE("update_posterior with empty data leaves the prior intact") {
    const auto prior = build_robust_map({7, 40}, 0.3);
    CHECK(update_posterior(prior, {0, 0}) == prior);
    CHECK(informative_weight(update_posterior(build_robust_map({7, 40}), {0, 0})) == 0.5);
}

TEST_CASE("update_posterior single component is a conjugate update") {
    const BetaMixture prior(std::vector<MixtureComponent>{{1.0, {2.5, 7.0}}});
    const auto post = update_posterior(prior, {13, 50});
    REQUIRE(post.size() == 1);
    CHECK(post[0].weight == 1.0);
    CHECK(post[0].params == BetaParams{15.5, 44.0});
}

TEST_CASE("update_posterior worked example against quadrature") {
    const auto prior = build_robust_map({5, 20});
    const auto post = update_posterior(prior, {25, 100});
    CHECK(post[0].params == BetaParams{26, 76});
    CHECK(post[1].params == BetaParams{31, 91});
    const double expect = oracle_weight(prior, {25, 100});
    CHECK(std::abs(informative_weight(post) - expect) <= 1e-8);
    CHECK(std::abs(post[0].weight + post[1].weight - 1.0) <= 1e-12);
}

TEST_CASE("informative weight matches quadrature on random data") {
    std::mt19937_64 gen(4242);
    for (int trial = 0; trial < 25; ++trial) {
        const int n1 = std::uniform_int_distribution<int>(0, 300)(gen);
        const int y1 = std::uniform_int_distribution<int>(0, n1)(gen);
        const int n2 = std::uniform_int_distribution<int>(0, 800)(gen);
        const int y2 = std::uniform_int_distribution<int>(0, n2)(gen);
        const double w = std::uniform_real_distribution<double>(0.05, 0.95)(gen);
        const auto prior = build_robust_map({y1, n1}, w);
        const auto post = update_posterior(prior, {y2, n2});
        CAPTURE(y1);
        CAPTURE(n1);
        CAPTURE(y2);
        CAPTURE(n2);
        CHECK(std::abs(informative_weight(post) - oracle_weight(prior, {y2, n2})) <= 1e-8);
    }
}

TEST_CASE("component marginals include the binomial coefficient") {
    const auto prior = build_robust_map({5, 20});
    const auto lm = component_log_marginals(prior, {3, 10});
    REQUIRE(lm.size() == 2);
    CHECK(std::abs(lm[0].value - std::log(1.0 / 11.0)) <= 1e-12);
    CHECK(std::abs(lm[1].value - oracle::log_marginal(3, 10, 6, 16)) <= 1e-10);
}

TEST_CASE("concordance moves the weight in the expected direction") {
    const auto prior = build_robust_map({10, 20});
    const ArmCounts agree{250, 500};
    const ArmCounts clash{450, 500};
    const double w_agree = informative_weight(update_posterior(prior, agree));
    const double w_clash = informative_weight(update_posterior(prior, clash));
    CHECK(w_agree > 0.5);
    CHECK(w_clash < 0.5);
    CHECK(std::abs(w_agree - oracle_weight(prior, agree)) <= 1e-8);
    CHECK(std::abs(w_clash - oracle_weight(prior, clash)) <= 1e-8);
}

TEST_CASE("sequential batches give the same posterior density") {
    std::mt19937_64 gen(77);
    for (int trial = 0; trial < 20; ++trial) {
        const int n0 = std::uniform_int_distribution<int>(0, 60)(gen);
        const int n1 = std::uniform_int_distribution<int>(0, 200)(gen);
        const int n2 = std::uniform_int_distribution<int>(0, 200)(gen);
        const int y0 = std::uniform_int_distribution<int>(0, n0)(gen);
        const int y1 = std::uniform_int_distribution<int>(0, n1)(gen);
        const int y2 = std::uniform_int_distribution<int>(0, n2)(gen);
        const auto prior = build_robust_map({y0, n0});
        const auto seq = update_posterior(update_posterior(prior, {y1, n1}), {y2, n2});
        const auto once = update_posterior(prior, {y1 + y2, n1 + n2});
        for (int i = 0; i < 100; ++i) {
            const double p = (i + 0.5) / 100.0;
            const double a = seq.density(p);
            const double b = once.density(p);
            CAPTURE(trial);
            CAPTURE(p);
            CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(b)));
        }
        for (std::size_t k = 0; k < 2; ++k) {
            CHECK(seq[k].params == once[k].params);
            CHECK(std::abs(seq[k].weight - once[k].weight) <= 1e-10);
        }
    }
}

TEST_CASE("posterior mean matches quadrature") {
    const auto post = update_posterior(build_robust_map({5, 20}), {25, 100});
    double formula = 0.0;
    for (const auto& c : post.components()) formula += c.weight * c.params.mean();
    CHECK(std::abs(post.mean() - formula) <= 1e-12);

    // ∫ p f(p) dp by Simpson on the mixture density itself.
    const int m = 200000;
    const double h = 1.0 / m;
    double s0 = 0.0;
    double s1 = 0.0;
    for (int i = 0; i <= m; ++i) {
        const double p = i * h;
        const double coef = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        const double f = post.density(p);
        s0 += coef * f;
        s1 += coef * p * f;
    }
    CHECK(std::abs(s0 * h / 3.0 - 1.0) <= 1e-12);
    CHECK(std::abs(s1 * h / 3.0 - post.mean()) <= 1e-12);
}

TEST_CASE("informative_weight requires two components") {
    CHECK_THROWS_AS(informative_weight(BetaMixture(std::vector<MixtureComponent>{{1.0, {1, 1}}})), DomainError);
    CHECK_THROWS_AS(informative_weight(BetaMixture(std::vector<MixtureComponent>{{0.2, {1, 1}}, {0.3, {2, 1}}, {0.5, {1, 2}}})), DomainError);
    CHECK(informative_weight(build_robust_map({1, 4})) == 0.5);
}

TEST_CASE("extreme counts stay finite") {
    const auto prior = build_robust_map({0, 2000});
    const auto post = update_posterior(prior, {1400, 1400});
    const double w = informative_weight(post);
    CHECK(std::isfinite(w));
    CHECK(w >= 0.0);
    CHECK(w < 1e-100);
}
