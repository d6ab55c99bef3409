#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "gtseq/design.hpp"
#include "gtseq/numerics.hpp"

namespace gtseq {

/// Sequential procedure: test m pools of size k, then one pool at a time
/// until n > zeta_k * psi(xbar_n). n_max truncates a run that never stops.
struct SequentialConfig {
    int k = 1;
    long long m = 1;
    DesignParams design;
    long long n_max = 1'000'000;
};

void validate(const SequentialConfig& cfg);

/// Running tally of a sequential study.
struct SequentialState {
    long long n = 0;
    long long s = 0;
    bool stopped = false;
    /// Set when the run reached cfg.n_max without meeting the stopping rule.
    bool truncated = false;
    double p_hat = 0.0;
    /// zeta_k * psi(xbar); +infinity while xbar is 0 or 1 or before the first pool.
    double threshold = 0.0;

    double xbar() const { return n > 0 ? static_cast<double>(s) / n : 0.0; }

    friend bool operator==(const SequentialState&, const SequentialState&) = default;
};

/// Fresh state before any pool has been tested.
SequentialState initial_state();

/// Record one pool outcome. Throws ContractError when the state has stopped.
SequentialState advance(const SequentialState& state, bool positive, const SequentialConfig& cfg);

/// Raised when the truncation horizon leaves more than the allowed tail mass.
class HorizonError : public std::runtime_error {
public:
    HorizonError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual)
    {
    }
    double residual() const { return residual_; }

private:
    double residual_;
};

/// Normal approximation to P(N > n).
double stopping_tail(long long n, Probability p, const SequentialConfig& cfg);

/// Horizon leaving a normal tail of ~12 standard deviations beyond the
/// centre zeta_k psi(theta_k); never below m + 10.
long long default_horizon(Probability p, int k, long long m, const DesignParams& d);

/// Probability mass function of the stopping variable on m..n_max.
struct StoppingPmf {
    long long first = 0;
    std::vector<double> probs;
    /// P(N > n_max) under the approximation; already folded into the last cell.
    double residual_tail = 0.0;

    long long last() const { return first + static_cast<long long>(probs.size()) - 1; }
    double at(long long n) const;
};

inline constexpr double kMaxResidualTail = 1e-9;

/// Throws HorizonError when P(N > cfg.n_max) exceeds kMaxResidualTail.
StoppingPmf stopping_pmf(Probability p, const SequentialConfig& cfg);

struct StoppingMoments {
    double mean = 0.0;
    double sd = 0.0;
    double mean_inverse = 0.0;
    double var_inverse = 0.0;
};

StoppingMoments n_moments(const StoppingPmf& pmf);

struct EstimatorMoments {
    double mean = 0.0;
    double sd = 0.0;
};

/// p + e_k E(1/N) and sqrt(e_k^2 Var(1/N) + v_k E(1/N)).
EstimatorMoments estimator_moments(Probability p, int k, const StoppingPmf& pmf);

/// 2 E[Phi(gamma p sqrt(N / v_k))] - 1 over the stopping distribution.
double coverage(Probability p, int k, double gamma, const StoppingPmf& pmf);

/// One analytic row of the sequential procedure.
struct SequentialAnalysis {
    StoppingMoments n;
    EstimatorMoments estimate;
    double cp = 0.0;
};

SequentialAnalysis analyze_sequential(Probability p, int k, long long m, const DesignParams& d);

/// The (p, k, m_k) configurations of the published sequential table.
struct SequentialPreset {
    double p;
    int k;
    long long m;
};

inline constexpr std::array<SequentialPreset, 7> kSequentialPresets = {{
    {0.5, 2, 250},
    {0.4, 3, 320},
    {0.3, 4, 390},
    {0.2, 7, 450},
    {0.1, 15, 510},
    {0.05, 31, 550},
    {0.01, 159, 585},
}};

}  // namespace gtseq
