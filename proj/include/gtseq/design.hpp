#pragma once

#include "gtseq/numerics.hpp"

namespace gtseq {

/// Precision contract: P(|p_hat - p| < gamma * p) >= 1 - alpha.
class DesignParams {
public:
    DesignParams(double alpha = 0.05, double gamma = 0.1);

    double alpha() const { return alpha_; }
    double gamma() const { return gamma_; }

    /// (1 - alpha)-quantile of chi-squared with one degree of freedom.
    double chi2() const { return chi2_; }

    friend bool operator==(const DesignParams&, const DesignParams&) = default;

private:
    double alpha_;
    double gamma_;
    double chi2_;
};

/// A fixed-sample group testing plan: pool size and required number of pools.
struct GroupPlan {
    int k = 1;
    double n_required = 0.0;
    long long n_ceil = 0;

    friend bool operator==(const GroupPlan&, const GroupPlan&) = default;
};

inline constexpr int kDefaultMaxPoolSize = 1000;

/// Probability that a pool of size k tests positive, 1 - (1-p)^k.
double theta_k(Probability p, int k);

/// Variance-shape factor of the pool-positivity rate,
/// theta (1-theta)^(2/k) / ((1-theta) (1 - (1-theta)^(1/k))^2).
///
/// Returns +infinity at theta in {0, 1}: the sequential stopping rule then
/// keeps sampling on a degenerate running mean.
double psi(double theta, int k);
double psi_derivative(double theta, int k);
double psi_second_derivative(double theta, int k);

/// chi2 / (gamma k)^2, the scale that turns psi into a group count.
double zeta(int k, const DesignParams& d);

/// Individual-testing sample size bound chi2 (1-p) / (p gamma^2).
double n_star_individual(Probability p, const DesignParams& d);

/// Pools of size k needed for the coverage contract, zeta_k * psi(theta_k).
GroupPlan n_star_group(Probability p, int k, const DesignParams& d);

/// Pool size in [1, k_max] minimising n_star_group. Ties within 1e-9 go to
/// the smaller k.
GroupPlan optimal_group_size(Probability p, const DesignParams& d,
                             int k_max = kDefaultMaxPoolSize);

}  // namespace gtseq
