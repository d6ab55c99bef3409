#pragma once

#include "gtseq/numerics.hpp"

namespace gtseq {

/// Outcome of testing n pools of size k, s of which were positive.
struct StageCounts {
    int k = 1;
    long long n = 0;
    long long s = 0;

    double xbar() const { return n > 0 ? static_cast<double>(s) / n : 0.0; }

    friend bool operator==(const StageCounts&, const StageCounts&) = default;
};

/// Two-stage data. stage2.n == 0 when sampling stopped after stage 1.
struct TwoStageRecord {
    StageCounts stage1;
    StageCounts stage2;

    long long n2() const { return stage1.n + stage2.n; }

    friend bool operator==(const TwoStageRecord&, const TwoStageRecord&) = default;
};

/// Raised when an operation's documented precondition is violated by the
/// caller (as opposed to a numeric domain problem).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

void validate(const StageCounts& c);
void validate(const TwoStageRecord& r);

/// 1 - (1 - xbar)^(1/k).
Probability mle_single(const StageCounts& c);

/// MLE when both stages use the same pool size. Throws ContractError when
/// the pool sizes differ.
Probability mle_pooled_same_k(const TwoStageRecord& r);

/// Coefficients (A, B, C, D) of A q^(k1+k2) + B q^k1 + C q^k2 + D, whose
/// interior root in (0,1) is the MLE of q = 1 - p.
struct ScorePolynomial {
    double a;
    double b;
    double c;
    double d;
    int k1;
    int k2;

    double operator()(double q) const;
};

ScorePolynomial score_polynomial(const TwoStageRecord& r);

/// Log-likelihood of p for two-stage data with arbitrary pool sizes.
double log_likelihood(const TwoStageRecord& r, double p);

/// d/dp of log_likelihood.
double score(const TwoStageRecord& r, double p);

/// Grand MLE of p for mixed pool sizes. 0 when no pool was positive, 1 when
/// every pool was positive; otherwise the unique interior root of the score.
Probability mle_mixed(const TwoStageRecord& r);

/// First-order bias coefficient e_k: E(p_hat_n) ~ p + e_k / n.
double delta_bias(Probability p, int k);

/// Asymptotic variance coefficient v_k: Var(p_hat_n) ~ v_k / n.
double delta_var(Probability p, int k);

/// Fisher information about p in a two-stage design with m stage-1 pools of
/// size k1 and an expected expected_m2 stage-2 pools of size k2.
double fisher_info_two_stage(Probability p, long long m, int k1, int k2, double expected_m2);

/// FI^(-1/2).
double asymptotic_sd(double fisher_info);

}  // namespace gtseq
