#include "support.hpp"

#include "gtseq/estimation.hpp"
#include "gtseq/sequential.hpp"
#include "oracles.hpp"

using namespace gtseq;

TEST_SUITE("sequential")
{
    TEST_CASE("stopping rule on a fixed running mean")
    {
        const SequentialConfig cfg{2, 250, DesignParams{}, 1'000'000};
        SequentialState st = initial_state();
        st.n = 287;
        st.s = 215;
        st = advance(st, true, cfg);  // n = 288, xbar = 0.75
        CHECK(st.n == 288);
        CHECK(st.xbar() == 0.75);
        CHECK_NEAR(st.threshold, 288.11, 0.01);
        CHECK_FALSE(st.stopped);
        CHECK_NEAR(st.p_hat, 0.5, 1e-15);
        st = advance(st, true, cfg);
        CHECK(st.n == 289);
        CHECK(st.stopped);
        CHECK_THROWS_AS(advance(st, true, cfg), ContractError);
    }

    TEST_CASE("degenerate running mean never stops")
    {
        const SequentialConfig cfg{3, 5, DesignParams{}, 1'000'000};
        SequentialState neg = initial_state();
        SequentialState pos = initial_state();
        for (int i = 0; i < 5000; ++i) {
            neg = advance(neg, false, cfg);
            pos = advance(pos, true, cfg);
        }
        CHECK_FALSE(neg.stopped);
        CHECK_FALSE(pos.stopped);
        CHECK(std::isinf(neg.threshold));
        CHECK(neg.p_hat == 0.0);
    }

    TEST_CASE("no stop before m")
    {
        // tiny zeta: the threshold is met from the first pool on
        const SequentialConfig cfg{2, 40, DesignParams(0.5, 0.9), 1'000'000};
        SequentialState st = initial_state();
        for (int i = 0; i < 39; ++i) {
            st = advance(st, i % 2 == 0, cfg);
            if (st.n >= 2) {
                CHECK(static_cast<double>(st.n) > st.threshold);
            }
            CHECK_FALSE(st.stopped);
        }
        st = advance(st, true, cfg);
        CHECK(st.stopped);
    }

    TEST_CASE("truncation at the horizon")
    {
        const SequentialConfig cfg{2, 5, DesignParams{}, 30};
        SequentialState st = initial_state();
        while (!st.stopped) {
            st = advance(st, false, cfg);
        }
        CHECK(st.n == 30);
        CHECK(st.truncated);
    }

    TEST_CASE("step-by-step rule equals a direct scan")
    {
        const DesignParams d(0.5, 0.9);
        const int k = 2;
        const long long m = 2;
        const double z = zeta(k, d);
        const SequentialConfig cfg{k, m, d, 1'000'000};
        for (int bits = 0; bits < 1024; ++bits) {
            std::vector<int> seq(10);
            for (int i = 0; i < 10; ++i) {
                seq[i] = (bits >> i) & 1;
            }
            const long long direct =
                oracle::first_stop(seq, m, [&](double x) { return z * psi(x, k); });
            SequentialState st = initial_state();
            long long stepped = 0;
            for (int o : seq) {
                st = advance(st, o == 1, cfg);
                if (st.stopped) {
                    stepped = st.n;
                    break;
                }
            }
            CAPTURE(bits);
            CHECK(stepped == direct);
        }
    }

    TEST_CASE("stopping tail")
    {
        const SequentialConfig cfg{2, 250, DesignParams{}, 1'000'000};
        // psi'(theta) = -8 at q = 0.5, so the spread at n = 288 is 96.0365 sqrt(12/288) = 19.6
        CHECK_NEAR(stopping_tail(308, 0.5, cfg), 1.0 - std_normal_cdf((308 - 288.1) / 19.6), 0.01);
        CHECK_NEAR(stopping_tail(308, 0.5, cfg), 0.155, 0.01);
        CHECK(stopping_tail(100000, 0.5, cfg) < 1e-300);
        CHECK_THROWS_AS(stopping_tail(249, 0.5, cfg), DomainError);
        // at the centre the standardized distance is zero
        const SequentialConfig c1{1, 1, DesignParams{}, 1'000'000};
        const double centre = zeta(1, c1.design) * psi(0.5, 1);
        const long long n = std::lround(centre);
        CHECK_NEAR(stopping_tail(n, 0.5, c1), 0.5, 0.02);
    }

    TEST_CASE("stopping pmf for the preset configurations")
    {
        const DesignParams d;
        for (const auto& pr : kSequentialPresets) {
            const SequentialConfig cfg{pr.k, pr.m, d, default_horizon(pr.p, pr.k, pr.m, d)};
            const StoppingPmf pmf = stopping_pmf(pr.p, cfg);
            double total = 0.0;
            bool nonneg = true;
            for (double x : pmf.probs) {
                total += x;
                nonneg = nonneg && x >= 0.0;
            }
            CAPTURE(pr.p);
            CHECK(nonneg);
            CHECK_NEAR(total, 1.0, 1e-9);
            CHECK(pmf.residual_tail < kMaxResidualTail);
        }
    }

    TEST_CASE("short horizon is reported")
    {
        const SequentialConfig cfg{2, 250, DesignParams{}, 290};
        try {
            (void)stopping_pmf(0.5, cfg);
            FAIL("expected HorizonError");
        } catch (const HorizonError& e) {
            CHECK(e.residual() > 0.3);
        }
    }

    TEST_CASE("moments of a point mass")
    {
        StoppingPmf pmf;
        pmf.first = 400;
        pmf.probs = {1.0};
        const StoppingMoments mo = n_moments(pmf);
        CHECK(mo.mean == 400.0);
        CHECK(mo.sd == 0.0);
        CHECK(mo.mean_inverse == 1.0 / 400);
        CHECK(mo.var_inverse == 0.0);

        // huge N: coverage tends to 1
        pmf.first = 100'000'000;
        CHECK(coverage(0.3, 4, 0.1, pmf) > 1.0 - 1e-12);
    }

    TEST_CASE("analytic rows")
    {
        const DesignParams d;
        const SequentialAnalysis a = analyze_sequential(0.5, 2, 250, d);
        CHECK_NEAR(a.n.mean, 288.23, 0.5);
        CHECK_REL(a.n.sd, 19.06, 0.05);
        CHECK_NEAR(a.estimate.mean, 0.5007, 5e-4);
        CHECK_NEAR(a.estimate.sd, 0.0256, 5e-4);
        CHECK_NEAR(a.cp, 0.9494, 0.003);

        CHECK_NEAR(analyze_sequential(0.3, 4, 390, d).cp, 0.9500, 0.003);
        const SequentialAnalysis b = analyze_sequential(0.1, 15, 510, d);
        CHECK_NEAR(b.n.mean, 533.87, 0.5);
        CHECK_REL(b.n.sd, 3.37, 0.05);
        CHECK_NEAR(analyze_sequential(0.01, 159, 585, d).n.mean, 587.88, 0.5);
        const SequentialAnalysis c = analyze_sequential(0.05, 31, 550, d);
        CHECK_NEAR(c.estimate.mean, 0.0501, 5e-4);
        CHECK_NEAR(c.estimate.sd, 0.0025, 5e-4);
    }

    TEST_CASE("individual testing is unbiased")
    {
        const DesignParams d;
        const SequentialConfig cfg{1, 300, d, default_horizon(0.5, 1, 300, d)};
        CHECK(estimator_moments(0.5, 1, stopping_pmf(0.5, cfg)).mean == 0.5);
    }

    TEST_CASE("coverage does not decrease with m")
    {
        const DesignParams d;
        for (const auto& pr : kSequentialPresets) {
            double prev = 0.0;
            for (long long m = pr.m - 200; m <= pr.m + 200; m += 50) {
                const double cp = analyze_sequential(pr.p, pr.k, m, d).cp;
                CAPTURE(pr.p);
                CAPTURE(m);
                CHECK(cp >= prev - 1e-12);
                prev = cp;
            }
        }
    }
}
