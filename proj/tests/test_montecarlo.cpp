#include "support.hpp"

#include "gtseq/io.hpp"
#include "gtseq/montecarlo.hpp"
#include "oracles.hpp"

using namespace gtseq;

TEST_SUITE("montecarlo")
{
    TEST_CASE("streams")
    {
        Stream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
        bool differs_c = false, differs_d = false;
        for (int i = 0; i < 100; ++i) {
            const auto x = a.next();
            CHECK(x == b.next());
            differs_c = differs_c || x != c.next();
            differs_d = differs_d || x != d.next();
        }
        CHECK(differs_c);
        CHECK(differs_d);

        Stream u(1, 0);
        double lo = 1.0, hi = 0.0, sum = 0.0;
        for (int i = 0; i < 100000; ++i) {
            const double x = u.uniform();
            lo = std::min(lo, x);
            hi = std::max(hi, x);
            sum += x;
        }
        CHECK(lo >= 0.0);
        CHECK(hi < 1.0);
        CHECK_NEAR(sum / 100000, 0.5, 0.005);
    }

    TEST_CASE("pool outcomes")
    {
        Stream s(5, 0);
        bool any_zero = false, any_one = false;
        for (int i = 0; i < 10000; ++i) {
            any_one = any_one || bernoulli_group(s, 0.0, 7);
            any_zero = any_zero || !bernoulli_group(s, 1.0, 7);
        }
        CHECK_FALSE(any_one);
        CHECK_FALSE(any_zero);

        long long hits = 0;
        const int draws = 1'000'000;
        for (int i = 0; i < draws; ++i) {
            hits += bernoulli_group(s, 0.1, 15) ? 1 : 0;
        }
        CHECK_NEAR(static_cast<double>(hits) / draws, 1.0 - std::pow(0.9, 15), 0.002);
    }

    TEST_CASE("summary statistics")
    {
        const std::vector<ReplicateResult> rs = {{10, 0.09, false}, {12, 0.11, true}, {14, 0.2, false}};
        const SimulationSummary s = summarize(rs, 0.1, 0.2);
        CHECK_NEAR(s.E_N, 12.0, 1e-12);
        CHECK_NEAR(s.sd_N, 2.0, 1e-12);
        CHECK_NEAR(s.E_phat, 0.4 / 3, 1e-12);
        CHECK_NEAR(s.CP, 2.0 / 3, 1e-12);
        CHECK_NEAR(s.mc_se_CP, std::sqrt(s.CP * (1 - s.CP) / 3), 1e-15);
        CHECK(s.flagged == 1);
        CHECK(s.replicates == 3);
    }

    TEST_CASE("single replicate is one deterministic path")
    {
        SimulationSpec spec;
        spec.p = 0.3;
        spec.k = 4;
        spec.m = 390;
        spec.replicates = 1;
        spec.seed = 77;
        const SimulationSummary a = run(spec);
        const SimulationSummary b = run(spec);
        CHECK(a == b);
        CHECK(a.sd_N == 0.0);
        const ReplicateResult r = run_replicate(spec, 0);
        CHECK(a.E_N == static_cast<double>(r.n));
        CHECK(a.E_phat == r.p_hat);
    }

    TEST_CASE("thread count does not change the output")
    {
        for (Procedure proc : {Procedure::Sequential, Procedure::TwoStageMle, Procedure::Adaptive}) {
            SimulationSpec spec;
            spec.procedure = proc;
            spec.p = 0.2;
            spec.k = 7;
            spec.m = 400;
            spec.replicates = 500;
            spec.seed = 2024;
            spec.threads = 1;
            const SimulationSummary one = run(spec);
            for (unsigned t : {2u, 3u, 8u}) {
                spec.threads = t;
                const SimulationSummary many = run(spec);
                CHECK(nlohmann::json(many).dump() == nlohmann::json(one).dump());
            }
        }
    }

    TEST_CASE("fixed-n coverage")
    {
        SimulationSpec spec;
        spec.procedure = Procedure::Fixed;
        spec.p = 0.3;
        spec.k = 4;
        spec.replicates = 10000;
        spec.seed = 12;
        const SimulationSummary s = run(spec);
        CHECK(s.E_N == 414.0);
        CHECK_NEAR(s.CP, 0.95, 3 * s.mc_se_CP);
    }

    TEST_CASE("compare")
    {
        SimulationSummary s;
        s.E_N = 300;
        s.mc_se_E_N = 2;
        s.sd_N = 20;
        s.mc_se_sd_N = 1;
        s.E_phat = 0.5;
        s.mc_se_E_phat = 0.001;
        s.sd_phat = 0.034;
        s.mc_se_sd_phat = 0.0008;
        s.CP = 0.84;
        s.mc_se_CP = 0.012;

        for (const auto& c : compare({300, 20, 0.5, 0.034, 0.84}, s)) {
            CHECK(c.z == 0.0);
            CHECK_FALSE(c.flagged);
        }
        const auto rows = compare({300, NAN, 0.5, 0.02868, NAN}, s);
        REQUIRE(rows.size() == 3);
        CHECK(rows[2].field == "sd_phat");
        CHECK(rows[2].flagged);
        CHECK_FALSE(rows[0].flagged);
    }

    TEST_CASE("procedure names")
    {
        for (Procedure p : {Procedure::Sequential, Procedure::TwoStageMle, Procedure::TwoStageLinear,
                            Procedure::Adaptive, Procedure::Fixed}) {
            CHECK(procedure_from_string(to_string(p)) == p);
        }
        CHECK(procedure_from_string("twostage-mle") == Procedure::TwoStageMle);
        CHECK_THROWS_AS(procedure_from_string("bogus"), DomainError);
    }

    TEST_CASE("fixed-n coverage matches binomial enumeration")
    {
        // P(|p_hat - p| < gamma p) summed over the binomial count of positive pools
        const DesignParams d;
        struct Case {
            double p;
            int k;
            double exact;
        };
        for (const Case& c : {Case{0.2, 7, 0.94301}, Case{0.3, 4, 0.94816}, Case{0.01, 159, 0.94644}}) {
            const long long n = n_star_group(c.p, c.k, d).n_ceil;
            const double theta = theta_k(c.p, c.k);
            double exact = 0.0;
            for (long long s = 0; s <= n; ++s) {
                const double p_hat = mle_single({c.k, n, s});
                if (std::abs(p_hat - c.p) < d.gamma() * c.p) {
                    exact += oracle::binomial_pmf(n, s, theta);
                }
            }
            CAPTURE(c.p);
            CHECK_NEAR(exact, c.exact, 1e-5);

            SimulationSpec spec;
            spec.procedure = Procedure::Fixed;
            spec.p = c.p;
            spec.k = c.k;
            spec.replicates = 20000;
            spec.seed = 5;
            const SimulationSummary sim = run(spec);
            CHECK(std::abs(sim.CP - exact) <= 3.0 * std::sqrt(exact * (1.0 - exact) / 20000));
        }
    }
}
