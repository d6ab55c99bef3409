#include "gtseq/adaptive.hpp"

#include <cmath>

#include "gtseq/sequential.hpp"

namespace gtseq {

void validate(const AdaptiveConfig& cfg)
{
    if (cfg.m0 < 1 || cfg.k0 < 1) {
        throw DomainError("adaptive: m0 and k0 must be >= 1");
    }
    if (!(cfg.m_fraction > 0.0 && cfg.m_fraction <= 1.0)) {
        throw DomainError("adaptive: m_fraction must lie in (0,1]");
    }
    if (!(cfg.horizon_factor >= 1.0)) {
        throw DomainError("adaptive: horizon_factor must be >= 1");
    }
    if (cfg.k_max < 1) {
        throw DomainError("adaptive: k_max must be >= 1");
    }
}

PhaseTwoDesign choose_k_m(Probability p_hat0, const AdaptiveConfig& cfg)
{
    validate(cfg);
    if (!(p_hat0 > 0.0 && p_hat0 < 1.0)) {
        throw DomainError("choose_k_m: pilot estimate must lie in (0,1)");
    }
    const GroupPlan plan = optimal_group_size(p_hat0, cfg.design, cfg.k_max);
    const auto m = static_cast<long long>(std::ceil(cfg.m_fraction * plan.n_required));
    return {plan.k, std::max(1LL, m)};
}

namespace {

StageCounts test_pools(OutcomeSource& outcomes, int k, long long n)
{
    StageCounts c{k, n, 0};
    for (long long i = 0; i < n; ++i) {
        c.s += outcomes.test(k) ? 1 : 0;
    }
    return c;
}

bool degenerate(const StageCounts& c)
{
    return c.s == 0 || c.s == c.n;
}

}  // namespace

AdaptiveResult run_adaptive(OutcomeSource& outcomes, const AdaptiveConfig& cfg)
{
    validate(cfg);
    AdaptiveResult res;
    res.pilot = test_pools(outcomes, cfg.k0, cfg.m0);
    if (degenerate(res.pilot)) {
        const StageCounts extra = test_pools(outcomes, cfg.k0, cfg.m0);
        res.pilot.n += extra.n;
        res.pilot.s += extra.s;
    }
    res.p_hat0 = mle_single(res.pilot);
    if (degenerate(res.pilot)) {
        res.degenerate_pilot = true;
        res.k = cfg.k0;
        res.phase2 = StageCounts{cfg.k0, 0, 0};
        res.n3 = res.pilot.n;
        res.p_hat_final = res.p_hat0;
        return res;
    }

    const PhaseTwoDesign design = choose_k_m(res.p_hat0, cfg);
    res.k = design.k;
    res.m = design.m;
    SequentialConfig seq{design.k, design.m, cfg.design,
                         static_cast<long long>(std::ceil(cfg.horizon_factor * design.m))};
    SequentialState state = initial_state();
    while (!state.stopped) {
        state = advance(state, outcomes.test(design.k), seq);
    }
    res.truncated = state.truncated;
    res.phase2 = StageCounts{design.k, state.n, state.s};
    res.n3 = res.pilot.n + state.n;
    res.p_hat_final = mle_mixed(TwoStageRecord{res.pilot, res.phase2});
    return res;
}

}  // namespace gtseq
