#include "gtseq/twostage.hpp"

#include <algorithm>
#include <cmath>

namespace gtseq {

void validate(const TwoStageConfig& cfg)
{
    if (cfg.m < 1) {
        throw DomainError("two-stage: m must be >= 1");
    }
    if (cfg.k1 < 1 || cfg.k2 < 1 || cfg.k_max < 1) {
        throw DomainError("two-stage: pool sizes must be >= 1");
    }
    if (!(cfg.stage2_cap_factor >= 1.0)) {
        throw DomainError("two-stage: stage2_cap_factor must be >= 1");
    }
}

Stage2Plan stage2_size(long long m, int k1, double xbar1, const DesignParams& d,
                       double cap_factor)
{
    if (m < 1) {
        throw DomainError("stage2_size: m must be >= 1");
    }
    if (!(xbar1 >= 0.0 && xbar1 <= 1.0)) {
        throw DomainError("stage2_size: xbar1 must lie in [0,1]");
    }
    const double z = zeta(k1, d);
    Stage2Plan plan;
    plan.n_required = z * psi(xbar1, k1);
    const auto md = static_cast<double>(m);

    if (std::isfinite(plan.n_required)) {
        if (md > plan.n_required) {
            plan.m2 = 0;
        } else {
            plan.m2 = static_cast<long long>(std::floor(plan.n_required)) + 1 - m;
        }
    } else {
        const double half = 0.5 / md;
        const double corrected = std::clamp(xbar1, half, 1.0 - half);
        const double cap = cap_factor * z * psi(corrected, k1);
        plan.capped = true;
        plan.m2 = std::max(0LL, static_cast<long long>(std::floor(cap)) + 1 - m);
    }
    plan.n2 = m + plan.m2;
    return plan;
}

int stage2_pool_size(double p_hat1, const TwoStageConfig& cfg)
{
    if (cfg.k2_rule == Stage2PoolRule::Fixed) {
        return cfg.k2;
    }
    if (p_hat1 <= 0.0) {
        return cfg.k_max;
    }
    if (p_hat1 >= 1.0) {
        return 1;
    }
    return std::clamp(optimal_group_size(p_hat1, cfg.design, cfg.k_max).k, 1, cfg.k_max);
}

N2Distribution n2_distribution(Probability p, long long m, int k1, const DesignParams& d)
{
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("n2_distribution: p must lie in (0,1)");
    }
    if (m < 1 || k1 < 1) {
        throw DomainError("n2_distribution: need m >= 1 and k1 >= 1");
    }
    const double theta = theta_k(p, k1);
    const double z = zeta(k1, d);
    const double slope = psi_derivative(theta, k1);

    N2Distribution dist;
    dist.centre = z * psi(theta, k1);
    dist.spread = z * std::abs(slope) * std::sqrt(theta * (1.0 - theta) / static_cast<double>(m));
    dist.first = m;

    auto cdf = [&](double x) {
        if (dist.spread == 0.0) {
            return x < dist.centre ? 0.0 : 1.0;
        }
        return std_normal_cdf((x - dist.centre) / dist.spread);
    };
    const auto top = std::max(
        m, static_cast<long long>(std::ceil(dist.centre + 12.0 * dist.spread)) + 1);

    // N2 = m when N < m, and n when n - 1 <= N < n for n > m.
    double prev = cdf(static_cast<double>(m));
    dist.probs.push_back(prev);
    for (long long n = m + 1; n <= top; ++n) {
        const double c = cdf(static_cast<double>(n));
        dist.probs.push_back(c - prev);
        prev = c;
    }
    dist.probs.back() += 1.0 - prev;

    for (std::size_t i = 0; i < dist.probs.size(); ++i) {
        const double n = static_cast<double>(m) + static_cast<double>(i);
        dist.mean += n * dist.probs[i];
        dist.mean_inverse += dist.probs[i] / n;
        dist.mean_inverse_sq += dist.probs[i] / (n * n);
    }
    double var = 0.0;
    for (std::size_t i = 0; i < dist.probs.size(); ++i) {
        const double n = static_cast<double>(m) + static_cast<double>(i);
        var += (n - dist.mean) * (n - dist.mean) * dist.probs[i];
    }
    dist.sd = std::sqrt(var);
    return dist;
}

Probability linear_combo(const TwoStageRecord& r)
{
    validate(r);
    const Probability p1 = mle_single(r.stage1);
    if (r.stage2.n == 0) {
        return p1;
    }
    return combine_estimates(r.stage1.n, p1, r.stage2.n, mle_single(r.stage2));
}

Probability combine_estimates(long long m, Probability p1, long long m2, Probability p2)
{
    if (m < 1 || m2 < 0) {
        throw DomainError("combine_estimates: need m >= 1 and M >= 0");
    }
    if (m2 == 0) {
        return p1;
    }
    const auto a = static_cast<double>(m);
    const auto b = static_cast<double>(m2);
    return std::clamp((a * p1 + b * p2) / (a + b), 0.0, 1.0);
}

PoolPower estimate_over_psi(int k)
{
    return PoolPower(3.0, 1.0, k);
}

PoolPower estimate_over_psi_squared(int k)
{
    return PoolPower(5.0, 2.0, k);
}

LinearComboMoments linear_combo_moments(Probability p, long long m, int k1, int k2,
                                        const DesignParams& d)
{
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("linear_combo_moments: p must lie in (0,1)");
    }
    if (m < 1 || k1 < 1 || k2 < 1) {
        throw DomainError("linear_combo_moments: need m >= 1 and pool sizes >= 1");
    }
    const double theta = theta_k(p, k1);
    const double md = static_cast<double>(m);
    const double v = theta * (1.0 - theta) / md;  // Var(xbar1)
    const double z = zeta(k1, d);

    // N2 ~ zeta psi(xbar1); every moment below is a delta-method expansion
    // around theta of a function of xbar1.
    const PoolPower g = estimate_over_psi(k1);
    const PoolPower g2 = estimate_over_psi_squared(k1);
    const PoolPower inv = PoolPower(2.0, 1.0, k1);
    const PoolPower inv2 = PoolPower(4.0, 2.0, k1);
    auto expect = [&](const PoolPower& f) { return f.value(theta) + 0.5 * f.d2(theta) * v; };

    const double e_p1_over_n = expect(g) / z;
    const double e_inv_n = expect(inv) / z;
    const double e_inv_n_sq = expect(inv2) / (z * z);
    const double e_p1_over_n_sq = expect(g2) / (z * z);

    // Stage-2 bias e_k2 and variance v_k2 of p_hat_2 per pool.
    const double bias2 = delta_bias(p, k2);
    const double var2 = delta_var(p, k2);
    const double shift = md * p - bias2;

    LinearComboMoments mo;
    mo.mean = p + md * e_p1_over_n - shift * e_inv_n;

    // E[(M/N2^2)] v_k2 with M = N2 - m.
    mo.expected_conditional_var = var2 * (e_inv_n - md * e_inv_n_sq);

    const double g_slope = g.d1(theta);
    const double inv_slope = inv.d1(theta);
    const double var_m_p1_over_n = md * md * g_slope * g_slope * v / (z * z);
    const double var_inv_n = inv_slope * inv_slope * v / (z * z);
    const double cov = e_p1_over_n_sq - e_p1_over_n * e_inv_n;
    mo.var_conditional_mean =
        var_m_p1_over_n + shift * shift * var_inv_n - 2.0 * md * shift * cov;

    mo.var = mo.expected_conditional_var + mo.var_conditional_mean;
    mo.se = std::sqrt(std::max(mo.var, 0.0));
    return mo;
}

double linear_combo_mean(Probability p, const TwoStageConfig& cfg, int k2)
{
    validate(cfg);
    return linear_combo_moments(p, cfg.m, cfg.k1, k2, cfg.design).mean;
}

double linear_combo_var(Probability p, const TwoStageConfig& cfg, int k2)
{
    validate(cfg);
    return linear_combo_moments(p, cfg.m, cfg.k1, k2, cfg.design).var;
}

double linear_combo_coverage(Probability p, double mean, double se, double gamma)
{
    if (!(se > 0.0)) {
        throw DomainError("linear_combo_coverage: se must be > 0");
    }
    const double bias = mean - p;
    const double half = gamma * p;
    const double cp =
        std_normal_cdf((half - bias) / se) + std_normal_cdf((half + bias) / se) - 1.0;
    return std::clamp(cp, 0.0, 1.0);
}

}  // namespace gtseq
