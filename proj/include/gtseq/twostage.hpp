#pragma once

#include <vector>

#include "gtseq/design.hpp"
#include "gtseq/estimation.hpp"
#include "gtseq/pool_power.hpp"

namespace gtseq {

enum class Stage2PoolRule {
    Fixed,             // use TwoStageConfig::k2
    OptimalFromStage1  // optimal_group_size(p_hat_1)
};

struct TwoStageConfig {
    long long m = 1;
    int k1 = 1;
    DesignParams design;
    Stage2PoolRule k2_rule = Stage2PoolRule::OptimalFromStage1;
    int k2 = 1;
    int k_max = kDefaultMaxPoolSize;
    /// Stage 2 never exceeds this multiple of the (continuity-corrected)
    /// requirement estimate; only reachable from a degenerate stage 1.
    double stage2_cap_factor = 50.0;
};

void validate(const TwoStageConfig& cfg);

struct Stage2Plan {
    /// zeta_k1 psi(xbar1); +infinity when xbar1 is 0 or 1.
    double n_required = 0.0;
    long long m2 = 0;
    long long n2 = 0;
    /// The requirement was not finite and stage 2 was sized by the cap.
    bool capped = false;
};

/// Stage-2 pool count: none when m > N_req, else floor(N_req) + 1 - m.
Stage2Plan stage2_size(long long m, int k1, double xbar1, const DesignParams& d,
                       double cap_factor = 50.0);

/// Stage-2 pool size for a stage-1 estimate under the configured rule.
int stage2_pool_size(double p_hat1, const TwoStageConfig& cfg);

/// Normal approximation to the total pool count N2 = max(m, floor(N) + 1)
/// with N ~ Normal(zeta psi(theta), zeta^2 AV(psi(xbar1))) at sample size m.
struct N2Distribution {
    double centre = 0.0;
    double spread = 0.0;
    long long first = 0;
    std::vector<double> probs;

    double mean = 0.0;
    double sd = 0.0;
    double mean_inverse = 0.0;
    double mean_inverse_sq = 0.0;

    /// E(M) = E(N2) - m.
    double expected_stage2(long long m) const { return mean - static_cast<double>(m); }
};

N2Distribution n2_distribution(Probability p, long long m, int k1, const DesignParams& d);

/// (m p_hat_1 + M p_hat_2) / N2; p_hat_1 when stage 2 is empty.
Probability linear_combo(const TwoStageRecord& r);
Probability combine_estimates(long long m, Probability p1, long long m2, Probability p2);

/// p_hat_1 / psi(xbar1) and p_hat_1 / psi(xbar1)^2 as functions of xbar1.
PoolPower estimate_over_psi(int k);
PoolPower estimate_over_psi_squared(int k);

/// Delta-method moments of the linear two-stage estimator with stage-2 pool
/// size held fixed at k2.
struct LinearComboMoments {
    double mean = 0.0;
    double var = 0.0;
    double se = 0.0;
    /// E(V(p_hat | xbar1)) and V(E(p_hat | xbar1)); var is their sum.
    double expected_conditional_var = 0.0;
    double var_conditional_mean = 0.0;
};

LinearComboMoments linear_combo_moments(Probability p, long long m, int k1, int k2,
                                        const DesignParams& d);
double linear_combo_mean(Probability p, const TwoStageConfig& cfg, int k2);
double linear_combo_var(Probability p, const TwoStageConfig& cfg, int k2);

/// Phi((gamma p - B)/se) + Phi((gamma p + B)/se) - 1 with B = mean - p.
double linear_combo_coverage(Probability p, double mean, double se, double gamma);

}  // namespace gtseq
