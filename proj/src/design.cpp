#include "gtseq/design.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "gtseq/pool_power.hpp"

namespace gtseq {

namespace {

void require_pool_size(int k, const char* where)
{
    if (k < 1) {
        std::ostringstream msg;
        msg << where << ": pool size must be >= 1, got " << k;
        throw DomainError(msg.str());
    }
}

bool degenerate(double theta)
{
    return !(theta > 0.0 && theta < 1.0);
}

}  // namespace

DesignParams::DesignParams(double alpha, double gamma) : alpha_(alpha), gamma_(gamma)
{
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("alpha must lie in (0,1)");
    }
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw DomainError("gamma must lie in (0,1)");
    }
    chi2_ = chi2_quantile_1df(1.0 - alpha);
}

double theta_k(Probability p, int k)
{
    require_pool_size(k, "theta_k");
    if (k == 1) {
        return p;
    }
    return -std::expm1(k * std::log1p(-p.value()));
}

double psi(double theta, int k)
{
    require_pool_size(k, "psi");
    if (std::isnan(theta) || theta < 0.0 || theta > 1.0) {
        throw DomainError("psi: theta must lie in [0,1]");
    }
    if (degenerate(theta)) {
        return std::numeric_limits<double>::infinity();
    }
    if (k == 1) {
        return (1.0 - theta) / theta;
    }
    return PoolPower(-2.0, -1.0, k).value(theta);
}

double psi_derivative(double theta, int k)
{
    require_pool_size(k, "psi_derivative");
    if (degenerate(theta)) {
        throw DomainError("psi_derivative: theta must lie in (0,1)");
    }
    return PoolPower(-2.0, -1.0, k).d1(theta);
}

double psi_second_derivative(double theta, int k)
{
    require_pool_size(k, "psi_second_derivative");
    if (degenerate(theta)) {
        throw DomainError("psi_second_derivative: theta must lie in (0,1)");
    }
    return PoolPower(-2.0, -1.0, k).d2(theta);
}

double zeta(int k, const DesignParams& d)
{
    require_pool_size(k, "zeta");
    const double gk = d.gamma() * k;
    return d.chi2() / (gk * gk);
}

double n_star_individual(Probability p, const DesignParams& d)
{
    if (degenerate(p)) {
        throw DomainError("n_star_individual: p must lie in (0,1)");
    }
    // Same operation order as n_star_group with k = 1.
    return zeta(1, d) * ((1.0 - p) / p);
}

GroupPlan n_star_group(Probability p, int k, const DesignParams& d)
{
    require_pool_size(k, "n_star_group");
    if (degenerate(p)) {
        throw DomainError("n_star_group: p must lie in (0,1)");
    }
    GroupPlan plan;
    plan.k = k;
    plan.n_required = zeta(k, d) * psi(theta_k(p, k), k);
    plan.n_ceil = static_cast<long long>(std::ceil(plan.n_required));
    return plan;
}

GroupPlan optimal_group_size(Probability p, const DesignParams& d, int k_max)
{
    require_pool_size(k_max, "optimal_group_size");
    GroupPlan best = n_star_group(p, 1, d);
    for (int k = 2; k <= k_max; ++k) {
        const GroupPlan plan = n_star_group(p, k, d);
        if (plan.n_required < best.n_required - 1e-9) {
            best = plan;
        }
    }
    return best;
}

}  // namespace gtseq
