#include "gtseq/sequential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gtseq/estimation.hpp"

namespace gtseq {

void validate(const SequentialConfig& cfg)
{
    if (cfg.k < 1) {
        throw DomainError("sequential: pool size k must be >= 1");
    }
    if (cfg.m < 1) {
        throw DomainError("sequential: initial pool count m must be >= 1");
    }
    if (cfg.n_max < cfg.m) {
        throw DomainError("sequential: n_max must be >= m");
    }
}

SequentialState initial_state()
{
    SequentialState s;
    s.threshold = std::numeric_limits<double>::infinity();
    return s;
}

SequentialState advance(const SequentialState& state, bool positive, const SequentialConfig& cfg)
{
    if (state.stopped) {
        throw ContractError("advance: the sequential run has already stopped");
    }
    validate(cfg);
    SequentialState next = state;
    next.n += 1;
    next.s += positive ? 1 : 0;
    const double xbar = next.xbar();
    next.threshold = zeta(cfg.k, cfg.design) * psi(xbar, cfg.k);
    next.p_hat = mle_single(StageCounts{cfg.k, next.n, next.s});
    next.stopped = next.n >= cfg.m && static_cast<double>(next.n) > next.threshold;
    if (!next.stopped && next.n >= cfg.n_max) {
        next.stopped = true;
        next.truncated = true;
    }
    return next;
}

namespace {

struct NormalModel {
    double centre;
    double scale_at_one;  // zeta * sqrt(psi'(theta)^2 theta (1-theta)); spread(n) = this / sqrt(n)
};

NormalModel stopping_model(Probability p, int k, const DesignParams& d)
{
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("stopping distribution: p must lie in (0,1)");
    }
    const double theta = theta_k(p, k);
    const double z = zeta(k, d);
    const double slope = psi_derivative(theta, k);
    return {z * psi(theta, k), z * std::abs(slope) * std::sqrt(theta * (1.0 - theta))};
}

double tail_from_model(const NormalModel& model, double n)
{
    const double spread = model.scale_at_one / std::sqrt(n);
    const double offset = n - model.centre;
    if (spread == 0.0) {
        return offset < 0.0 ? 1.0 : (offset > 0.0 ? 0.0 : 0.5);
    }
    return std_normal_cdf(-offset / spread);
}

}  // namespace

double stopping_tail(long long n, Probability p, const SequentialConfig& cfg)
{
    validate(cfg);
    if (n < cfg.m) {
        throw DomainError("stopping_tail: n must be >= m");
    }
    return tail_from_model(stopping_model(p, cfg.k, cfg.design), static_cast<double>(n));
}

long long default_horizon(Probability p, int k, long long m, const DesignParams& d)
{
    const NormalModel model = stopping_model(p, k, d);
    const double spread = model.scale_at_one / std::sqrt(model.centre);
    const auto horizon = static_cast<long long>(std::ceil(model.centre + 12.0 * spread));
    return std::max(horizon, m + 10);
}

double StoppingPmf::at(long long n) const
{
    if (n < first || n > last()) {
        return 0.0;
    }
    return probs[static_cast<std::size_t>(n - first)];
}

StoppingPmf stopping_pmf(Probability p, const SequentialConfig& cfg)
{
    validate(cfg);
    const NormalModel model = stopping_model(p, cfg.k, cfg.design);

    StoppingPmf pmf;
    pmf.first = cfg.m;
    pmf.probs.reserve(static_cast<std::size_t>(cfg.n_max - cfg.m + 1));
    // The approximate tail is decreasing for n > centre / 3; the running
    // minimum keeps the masses nonnegative for pilots far below the centre.
    double prev_tail = tail_from_model(model, static_cast<double>(cfg.m));
    pmf.probs.push_back(1.0 - prev_tail);
    for (long long n = cfg.m + 1; n <= cfg.n_max; ++n) {
        const double tail = std::min(prev_tail, tail_from_model(model, static_cast<double>(n)));
        pmf.probs.push_back(prev_tail - tail);
        prev_tail = tail;
    }
    pmf.residual_tail = prev_tail;
    if (pmf.residual_tail > kMaxResidualTail) {
        std::ostringstream msg;
        msg << "stopping_pmf: horizon n_max=" << cfg.n_max << " leaves tail mass "
            << pmf.residual_tail;
        throw HorizonError(msg.str(), pmf.residual_tail);
    }
    pmf.probs.back() += pmf.residual_tail;
    return pmf;
}

StoppingMoments n_moments(const StoppingPmf& pmf)
{
    StoppingMoments mo;
    for (std::size_t i = 0; i < pmf.probs.size(); ++i) {
        const double n = static_cast<double>(pmf.first) + static_cast<double>(i);
        mo.mean += n * pmf.probs[i];
        mo.mean_inverse += pmf.probs[i] / n;
    }
    double var = 0.0;
    double inv_second = 0.0;
    for (std::size_t i = 0; i < pmf.probs.size(); ++i) {
        const double n = static_cast<double>(pmf.first) + static_cast<double>(i);
        var += (n - mo.mean) * (n - mo.mean) * pmf.probs[i];
        const double dev = 1.0 / n - mo.mean_inverse;
        inv_second += dev * dev * pmf.probs[i];
    }
    mo.sd = std::sqrt(var);
    mo.var_inverse = inv_second;
    return mo;
}

EstimatorMoments estimator_moments(Probability p, int k, const StoppingPmf& pmf)
{
    const StoppingMoments mo = n_moments(pmf);
    const double e = delta_bias(p, k);
    const double v = delta_var(p, k);
    return {p + e * mo.mean_inverse, std::sqrt(e * e * mo.var_inverse + v * mo.mean_inverse)};
}

double coverage(Probability p, int k, double gamma, const StoppingPmf& pmf)
{
    const double v = delta_var(p, k);
    double acc = 0.0;
    for (std::size_t i = 0; i < pmf.probs.size(); ++i) {
        const double n = static_cast<double>(pmf.first) + static_cast<double>(i);
        acc += pmf.probs[i] * std_normal_cdf(gamma * p * std::sqrt(n / v));
    }
    return std::clamp(2.0 * acc - 1.0, 0.0, 1.0);
}

SequentialAnalysis analyze_sequential(Probability p, int k, long long m, const DesignParams& d)
{
    SequentialConfig cfg{k, m, d, default_horizon(p, k, m, d)};
    const StoppingPmf pmf = stopping_pmf(p, cfg);
    return {n_moments(pmf), estimator_moments(p, k, pmf), coverage(p, k, d.gamma(), pmf)};
}

}  // namespace gtseq
