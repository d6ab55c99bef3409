#include "support.hpp"

#include "gtseq/adaptive.hpp"
#include "gtseq/montecarlo.hpp"
#include "gtseq/sequential.hpp"

using namespace gtseq;

namespace {

class Constant : public OutcomeSource {
public:
    explicit Constant(bool v) : v_(v) {}
    bool test(int) override
    {
        ++calls;
        return v_;
    }
    long long calls = 0;

private:
    bool v_;
};

class Bernoulli : public OutcomeSource {
public:
    Bernoulli(double p, std::uint64_t seed) : stream_(seed, 0), p_(p) {}
    bool test(int k) override { return bernoulli_group(stream_, p_, k); }

private:
    Stream stream_;
    double p_;
};

}  // namespace

TEST_SUITE("adaptive")
{
    TEST_CASE("phase-two design from the pilot estimate")
    {
        AdaptiveConfig cfg;
        cfg.m_fraction = 0.95;
        CHECK(choose_k_m(0.5, cfg) == PhaseTwoDesign{2, 274});
        CHECK(choose_k_m(0.1, cfg).k == 15);
        const int k = choose_k_m(0.01, cfg).k;
        CHECK((k == 158 || k == 159));
        cfg.m_fraction = 1.0;
        CHECK(choose_k_m(0.5, cfg) == PhaseTwoDesign{2, 289});
        CHECK(choose_k_m(0.2345, cfg) == choose_k_m(0.2345, cfg));
        CHECK_THROWS_AS(choose_k_m(0.0, cfg), DomainError);
    }

    TEST_CASE("degenerate pilots")
    {
        AdaptiveConfig cfg;
        for (bool v : {false, true}) {
            Constant src(v);
            const AdaptiveResult r = run_adaptive(src, cfg);
            CHECK(r.degenerate_pilot);
            CHECK(r.n3 == 200);
            CHECK(src.calls == 200);
            CHECK(r.p_hat_final == (v ? 1.0 : 0.0));
        }
    }

    TEST_CASE("a run uses pilot and sequential phase")
    {
        AdaptiveConfig cfg;
        for (double p : {0.5, 0.2, 0.05}) {
            for (std::uint64_t seed = 1; seed <= 30; ++seed) {
                Bernoulli src(p, seed);
                const AdaptiveResult r = run_adaptive(src, cfg);
                if (r.degenerate_pilot) {
                    continue;
                }
                CHECK(r.n3 >= cfg.m0 + 1);
                CHECK(r.n3 == r.pilot.n + r.phase2.n);
                CHECK(r.phase2.n >= r.m);
                CHECK(r.p_hat_final == mle_mixed({r.pilot, r.phase2}));
            }
        }
    }

    TEST_CASE("adaptive precision is close to the optimal sequential design")
    {
        // sd(p_hat) of the adaptive design within 1.3x of the known-p sequential design
        const DesignParams d;
        for (const auto& pr : kSequentialPresets) {
            if (pr.p > 0.2) {
                continue;
            }
            SimulationSpec spec;
            spec.procedure = Procedure::Adaptive;
            spec.p = pr.p;
            spec.replicates = 2000;
            spec.seed = 17;
            const SimulationSummary s = run(spec);
            const double reference = analyze_sequential(pr.p, pr.k, pr.m, d).estimate.sd;
            CAPTURE(pr.p);
            CHECK(s.sd_phat <= 1.3 * reference);
        }
    }

    TEST_CASE("configuration is validated")
    {
        AdaptiveConfig cfg;
        cfg.m_fraction = 0.0;
        Constant src(false);
        CHECK_THROWS_AS(run_adaptive(src, cfg), DomainError);
    }
}
