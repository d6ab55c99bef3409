#include "support.hpp"

#include <random>

#include "gtseq/design.hpp"
#include "gtseq/estimation.hpp"
#include "oracles.hpp"

using namespace gtseq;

namespace {

TwoStageRecord lemma_example()
{
    return {{2, 2, 1}, {3, 1, 1}};
}

// 1 - (1 - xbar)^(1/k)
double g_inverse(double xbar, int k)
{
    return 1.0 - std::pow(1.0 - xbar, 1.0 / k);
}

}  // namespace

TEST_SUITE("estimation")
{
    TEST_CASE("single-stage MLE")
    {
        CHECK_NEAR(mle_single({1, 10, 3}), 0.3, 1e-15);
        CHECK_NEAR(mle_single({2, 4, 3}), 0.5, 1e-15);
        CHECK(mle_single({5, 7, 0}) == 0.0);
        CHECK(mle_single({5, 7, 7}) == 1.0);
        CHECK_THROWS_AS(mle_single({2, 0, 0}), DomainError);
        CHECK_THROWS_AS(mle_single({2, 3, 4}), DomainError);
    }

    TEST_CASE("MLE inverts theta_k")
    {
        for (int k : {1, 2, 5, 31}) {
            for (long long n : {7LL, 40LL, 333LL}) {
                for (long long s = 1; s < n; s += 3) {
                    const StageCounts c{k, n, s};
                    CHECK_NEAR(theta_k(mle_single(c), k), c.xbar(), 1e-12);
                    CHECK_NEAR(mle_single(c), g_inverse(c.xbar(), k), 1e-12);
                }
            }
        }
    }

    TEST_CASE("MLE is strictly increasing in s")
    {
        for (int k : {1, 3, 50}) {
            double prev = -1.0;
            for (long long s = 0; s <= 60; ++s) {
                const double p = mle_single({k, 60, s});
                CHECK(p > prev);
                prev = p;
            }
        }
    }

    TEST_CASE("pooled MLE with equal pool sizes")
    {
        const TwoStageRecord r{{2, 4, 2}, {2, 2, 1}};
        CHECK(mle_pooled_same_k(r) == mle_single({2, 6, 3}));
        CHECK(mle_pooled_same_k({{3, 9, 4}, {3, 0, 0}}) == mle_single({3, 9, 4}));
        CHECK_THROWS_AS(mle_pooled_same_k({{2, 4, 2}, {3, 2, 1}}), ContractError);
    }

    TEST_CASE("Lemma polynomial coefficients")
    {
        const ScorePolynomial poly = score_polynomial(lemma_example());
        CHECK(poly.d == 2.0);
        CHECK(poly.c == -5.0);
        CHECK(poly.b == -4.0);
        CHECK(poly.a == 7.0);
    }

    TEST_CASE("mixed MLE on the worked example")
    {
        const TwoStageRecord r = lemma_example();
        const ScorePolynomial poly = score_polynomial(r);
        // interior root of 7 q^5 - 5 q^3 - 4 q^2 + 2 by grid scan (q = 1 is a trivial root)
        const auto roots = oracle::grid_sign_changes(poly, 1e-7, 1.0 - 1e-6, 1e-7);
        REQUIRE(roots.size() == 1);
        CHECK_NEAR(roots[0], 0.604, 5e-4);

        const double p_hat = mle_mixed(r);
        CHECK_NEAR(1.0 - p_hat, roots[0], 1e-7);
        CHECK_NEAR(p_hat, 0.396, 5e-4);

        double best_p = 0.0, best_ll = -INFINITY;
        for (int i = 1; i < 10000; ++i) {
            const double p = i * 1e-4;
            const double ll = log_likelihood(r, p);
            if (ll > best_ll) {
                best_ll = ll;
                best_p = p;
            }
        }
        CHECK_NEAR(p_hat, best_p, 1e-4);
    }

    TEST_CASE("mixed MLE boundaries")
    {
        CHECK(mle_mixed({{2, 5, 0}, {3, 4, 0}}) == 0.0);
        CHECK(mle_mixed({{2, 5, 5}, {3, 4, 4}}) == 1.0);
        CHECK(mle_mixed({{2, 5, 0}, {3, 0, 0}}) == 0.0);
    }

    TEST_CASE("mixed MLE reduces to pooled MLE for equal pool sizes")
    {
        std::mt19937_64 rng(21);
        for (int i = 0; i < 200; ++i) {
            const int k = std::uniform_int_distribution<int>(1, 40)(rng);
            const long long m = std::uniform_int_distribution<long long>(1, 300)(rng);
            const long long mm = std::uniform_int_distribution<long long>(0, 300)(rng);
            const long long s1 = std::uniform_int_distribution<long long>(0, m)(rng);
            const long long s2 = std::uniform_int_distribution<long long>(0, mm)(rng);
            const TwoStageRecord r{{k, m, s1}, {k, mm, s2}};
            CHECK_NEAR(mle_mixed(r), mle_pooled_same_k(r), 1e-10);
        }
    }

    TEST_CASE("Lemma polynomial has one interior sign change")
    {
        std::mt19937_64 rng(8);
        for (int i = 0; i < 20; ++i) {
            const int k1 = std::uniform_int_distribution<int>(1, 12)(rng);
            int k2 = std::uniform_int_distribution<int>(1, 12)(rng);
            if (k2 == k1) {
                ++k2;
            }
            const long long m = std::uniform_int_distribution<long long>(2, 50)(rng);
            const long long mm = std::uniform_int_distribution<long long>(2, 50)(rng);
            const long long s1 = std::uniform_int_distribution<long long>(1, m - 1)(rng);
            const long long s2 = std::uniform_int_distribution<long long>(0, mm)(rng);
            const ScorePolynomial poly = score_polynomial({{k1, m, s1}, {k2, mm, s2}});
            // stop short of the trivial root at q = 1
            const auto roots = oracle::grid_sign_changes(poly, 1e-5, 1.0 - 1.5e-5, 1e-5);
            CAPTURE(k1);
            CAPTURE(k2);
            CHECK(roots.size() == 1);
        }
    }

    TEST_CASE("expected score is zero")
    {
        // exhaustive over all (S1, S2) outcomes
        for (double p : {0.1, 0.3, 0.5}) {
            for (long long m = 1; m <= 5; ++m) {
                for (long long mm = 0; mm <= 5; ++mm) {
                    const int k1 = 2;
                    const int k2 = 5;
                    double expected = 0.0;
                    for (long long s1 = 0; s1 <= m; ++s1) {
                        for (long long s2 = 0; s2 <= mm; ++s2) {
                            const double w = oracle::binomial_pmf(m, s1, theta_k(p, k1)) *
                                             oracle::binomial_pmf(mm, s2, theta_k(p, k2));
                            expected += w * score({{k1, m, s1}, {k2, mm, s2}}, p);
                        }
                    }
                    CHECK_NEAR(expected, 0.0, 1e-10);
                }
            }
        }
    }

    TEST_CASE("delta-method coefficients")
    {
        CHECK(delta_bias(0.3, 1) == 0.0);
        CHECK(delta_bias(0.3, 4) > 0.0);
        CHECK_NEAR(delta_bias(0.5, 2), 0.1875, 1e-15);
        CHECK_NEAR(0.5 + delta_bias(0.5, 2) / 288, 0.5007, 5e-5);
        CHECK_NEAR(delta_var(0.3, 1), 0.21, 1e-15);
        CHECK_NEAR(delta_var(0.5, 2), 0.1875, 1e-15);
        CHECK_NEAR(std::sqrt(delta_var(0.5, 2) / 288), 0.0255, 5e-5);
    }

    TEST_CASE("delta-method variance approaches the exact variance")
    {
        const double p = 0.3;
        const int k = 2;
        auto exact_var = [&](long long n) {
            double mean = 0.0, second = 0.0;
            for (long long s = 0; s <= n; ++s) {
                const double w = oracle::binomial_pmf(n, s, theta_k(p, k));
                const double e = g_inverse(static_cast<double>(s) / n, k);
                mean += w * e;
                second += w * e * e;
            }
            return second - mean * mean;
        };
        double prev_gap = INFINITY;
        for (long long n : {50LL, 100LL, 200LL, 400LL}) {
            const double gap = std::abs(exact_var(n) - delta_var(p, k) / n) / exact_var(n);
            CAPTURE(n);
            if (n == 50) {
                CHECK(gap < 0.10);
            }
            CHECK(gap < prev_gap);
            prev_gap = gap;
        }
    }

    TEST_CASE("two-stage Fisher information")
    {
        auto direct = [](double p, double m, int k1, int k2, double em) {
            const double q = 1.0 - p;
            return m * k1 * k1 * std::pow(q, k1 - 2) / (1.0 - std::pow(q, k1)) +
                   em * k2 * k2 * std::pow(q, k2 - 2) / (1.0 - std::pow(q, k2));
        };
        CHECK_REL(fisher_info_two_stage(0.5, 200, 2, 3, 88.61), direct(0.5, 200, 2, 3, 88.61), 1e-13);
        CHECK_NEAR(fisher_info_two_stage(0.5, 200, 2, 3, 88.61), 1522.4, 0.05);
        CHECK_NEAR(asymptotic_sd(fisher_info_two_stage(0.5, 200, 2, 3, 88.61)), 0.02563, 5e-6);
        CHECK_REL(fisher_info_two_stage(0.05, 500, 31, 31, 63.89), direct(0.05, 500, 31, 31, 63.89),
                  1e-12);
        // no stage 2: single-stage information
        const double p = 0.2;
        const int k = 7;
        CHECK_REL(fisher_info_two_stage(p, 400, k, 3, 0.0),
                  400 * k * k * std::pow(1 - p, k - 2) / theta_k(p, k), 1e-13);
        // and its inverse is the delta-method variance
        CHECK_REL(1.0 / fisher_info_two_stage(p, 400, k, k, 0.0), delta_var(p, k) / 400, 1e-12);
    }
}
