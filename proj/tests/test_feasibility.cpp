#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "pilot_borrow/feasibility.hpp"
#include "pilot_borrow/stats.hpp"

using namespace pilot_borrow;

TEST_CASE("expected_duration examples") {
    CHECK(expected_duration(846, 10) == doctest::Approx(84.6));
    CHECK(display_months(expected_duration(846, 10)) == 85);
    CHECK(expected_duration(206, 5) == doctest::Approx(41.2));
    CHECK(display_months(expected_duration(206, 5)) == 41);
    CHECK(expected_duration(100, 10) == 10.0);
    CHECK(display_months(20.5) == 21);
    CHECK(display_months(84.5) == 85);
    CHECK_THROWS_AS(expected_duration(100, 0), DomainError);
    CHECK_THROWS_AS(expected_duration(100, -2), DomainError);
}

TEST_CASE("expected_duration times rate recovers n") {
    for (std::int64_t n : {0, 1, 37, 206, 846, 1402, 99999}) {
        for (double lambda : {0.3, 2.0, 5.0, 7.7, 10.0}) {
            CHECK(std::abs(expected_duration(n, lambda) * lambda - static_cast<double>(n)) <= 1e-12 * std::max<double>(1, n));
        }
    }
}

TEST_CASE("per-arm basis") {
    CHECK(duration_for(846, 10, RateBasis::total) == doctest::Approx(84.6));
    CHECK(duration_for(846, 10, RateBasis::per_arm) == doctest::Approx(42.3));
    CHECK(recruitment_target(846, RateBasis::total) == 846);
    CHECK(recruitment_target(847, RateBasis::per_arm) == 424);
}

TEST_CASE("recruitment model") {
    const auto m = RecruitmentModel::from_pilot_rate(5);
    CHECK(m.gamma_shape == 10.0);
    CHECK(m.gamma_rate == 2.0);
    CHECK(m.prior_mean() == doctest::Approx(5.0));
    CHECK(m.prior_variance() == doctest::Approx(2.5));
    CHECK_THROWS_AS(RecruitmentModel::from_pilot_rate(0), DomainError);
}

TEST_CASE("negbin_params examples") {
    const auto a = negbin_params(RecruitmentModel::from_pilot_rate(5), 2);
    CHECK(a.r == 10.0);
    CHECK(a.p == 0.5);
    const auto b = negbin_params(RecruitmentModel::from_pilot_rate(2), 46);
    CHECK(b.r == 4.0);
    CHECK(b.p == doctest::Approx(2.0 / 48.0));
    const auto c = negbin_params(RecruitmentModel::from_pilot_rate(10), 1e-12);
    CHECK(c.p == doctest::Approx(1.0));
    CHECK_THROWS_AS(negbin_params(RecruitmentModel::from_pilot_rate(10), 0), DomainError);
}

TEST_CASE("recruitment_probability with zero recruits needed") {
    for (double lambda0 : {0.5, 5.0, 20.0}) {
        for (double m : {0.01, 3.0, 100.0}) {
            CHECK(recruitment_probability(RecruitmentModel::from_pilot_rate(lambda0), 0, m) == 1.0);
        }
    }
}

TEST_CASE("survival identity against pmf summation") {
    for (double lambda0 : {0.7, 2.0, 5.0, 10.0}) {
        for (double m : {1.0, 12.0, 24.0, 48.0, 96.0}) {
            const auto nb = negbin_params(RecruitmentModel::from_pilot_rate(lambda0), m);
            for (std::int64_t n : {1, 2, 10, 50, 200, 800, 2000, 5000}) {
                long double below = 0.0L;
                for (std::int64_t k = 0; k < n; ++k) below += std::exp(oracle::negbin_log_pmf(k, nb.r, nb.p));
                const double surv = recruitment_probability(RecruitmentModel::from_pilot_rate(lambda0), n, m);
                CAPTURE(lambda0);
                CAPTURE(m);
                CAPTURE(n);
                CHECK(std::abs(surv + static_cast<double>(below) - 1.0) <= 1e-10);
            }
        }
    }
}

TEST_CASE("negative binomial mean") {
    for (double lambda0 : {2.0, 5.0, 10.0}) {
        for (double m : {12.0, 24.0, 48.0}) {
            const auto nb = negbin_params(RecruitmentModel::from_pilot_rate(lambda0), m);
            long double mean = 0.0L;
            const auto kmax = static_cast<std::int64_t>(20.0 * lambda0 * m);
            for (std::int64_t k = 0; k <= kmax; ++k) mean += k * std::exp(oracle::negbin_log_pmf(k, nb.r, nb.p));
            CHECK(std::abs(static_cast<double>(mean) / (lambda0 * m) - 1.0) <= 1e-3);
        }
    }
}

TEST_CASE("survival agrees with Gamma-Poisson sampling") {
    std::uint64_t seed = 300;
    for (double lambda0 : {2.0, 5.0, 10.0}) {
        for (double m : {12.0, 24.0, 48.0, 96.0}) {
            const auto counts = oracle::gamma_poisson_counts(lambda0, m, 1000000, ++seed);
            for (std::int64_t n : {50, 200, 800}) {
                const auto hits = std::count_if(counts.begin(), counts.end(), [&](std::int64_t k) { return k >= n; });
                const double p = static_cast<double>(hits) / counts.size();
                const double got = recruitment_probability(RecruitmentModel::from_pilot_rate(lambda0), n, m);
                const double se = std::sqrt(std::max(p * (1 - p), got * (1 - got)) / counts.size());
                CAPTURE(lambda0);
                CAPTURE(m);
                CAPTURE(n);
                CAPTURE(p);
                CHECK(std::abs(got - p) <= 3.0 * se);
            }
        }
    }
}

TEST_CASE("worked example against sampling") {
    const auto counts = oracle::gamma_poisson_counts(5, 46, 1000000, 46230);
    const auto hits = std::count_if(counts.begin(), counts.end(), [](std::int64_t k) { return k >= 230; });
    const double p = static_cast<double>(hits) / counts.size();
    const double se = std::sqrt(p * (1 - p) / counts.size());
    CHECK(std::abs(recruitment_probability(RecruitmentModel::from_pilot_rate(5), 230, 46) - p) <= 3.0 * se);
}

TEST_CASE("survival is monotone in months and in n") {
    for (double lambda0 : {2.0, 5.0, 10.0}) {
        const auto model = RecruitmentModel::from_pilot_rate(lambda0);
        for (std::int64_t n : {50, 230, 800}) {
            double prev = 0.0;
            for (double m = 0.5; m <= 600.0; m += 0.5) {
                const double v = recruitment_probability(model, n, m);
                CHECK(v >= prev);
                prev = v;
            }
            CHECK(recruitment_probability(model, n, 1e5) > 0.999);
        }
        for (double m : {12.0, 46.0, 96.0}) {
            double prev = 1.0;
            for (std::int64_t n = 0; n <= 1500; n += 10) {
                const double v = recruitment_probability(model, n, m);
                CHECK(v <= prev);
                prev = v;
            }
        }
    }
}

TEST_CASE("months_for_probability contract") {
    const auto model = RecruitmentModel::from_pilot_rate(5);
    CHECK(months_for_probability(model, 0, 0.9) == doctest::Approx(0.01));
    for (std::int64_t n : {1, 41, 230, 846}) {
        for (double t : {0.1, 0.5, 0.83, 0.99}) {
            const double m = months_for_probability(model, n, t);
            CAPTURE(n);
            CAPTURE(t);
            CHECK(std::abs(m * 100.0 - std::round(m * 100.0)) <= 1e-6);
            CHECK(recruitment_probability(model, n, m) >= t);
            if (m > 0.015) CHECK(recruitment_probability(model, n, m - 0.01) < t);
        }
    }
    CHECK_THROWS_AS(months_for_probability(model, 10, 0.0), DomainError);
    CHECK_THROWS_AS(months_for_probability(model, 10, 1.0), DomainError);
}

TEST_CASE("months_for_probability against the sampled arrival time") {
    // N(m) >= n exactly when the n-th arrival T_n <= m, and T_n | λ ~ Gamma(n, λ).
    std::mt19937_64 gen(830);
    std::gamma_distribution<double> rate(10.0, 0.5);
    std::gamma_distribution<double> wait(230.0, 1.0);
    std::vector<double> t(1000000);
    for (auto& v : t) v = wait(gen) / rate(gen);
    const auto k = static_cast<std::size_t>(std::ceil(0.83 * t.size())) - 1;
    std::nth_element(t.begin(), t.begin() + k, t.end());
    const double m = months_for_probability(RecruitmentModel::from_pilot_rate(5), 230, 0.83);
    CHECK(std::abs(m - t[k]) <= 0.25);
}
