#include "gtseq/estimation.hpp"

#include <cmath>
#include <sstream>

namespace gtseq {

namespace {

constexpr double kEdge = 1e-12;

// 1 - q^k and q^(k-1) evaluated from log q without cancellation.
double one_minus_qk(double log_q, int k)
{
    return -std::expm1(k * log_q);
}

// q^(-k) - 1
double inv_qk_minus_one(Probability p, int k)
{
    return std::expm1(-k * std::log1p(-p.value()));
}

void require_interior(Probability p, const char* where)
{
    if (!(p > 0.0 && p < 1.0)) {
        std::ostringstream msg;
        msg << where << ": p must lie in (0,1), got " << p.value();
        throw DomainError(msg.str());
    }
}

}  // namespace

void validate(const StageCounts& c)
{
    if (c.k < 1) {
        throw DomainError("pool size must be >= 1");
    }
    if (c.n < 0 || c.s < 0 || c.s > c.n) {
        std::ostringstream msg;
        msg << "stage counts need 0 <= s <= n, got n=" << c.n << " s=" << c.s;
        throw DomainError(msg.str());
    }
}

void validate(const TwoStageRecord& r)
{
    validate(r.stage1);
    validate(r.stage2);
    if (r.stage1.n < 1) {
        throw DomainError("two-stage record needs at least one stage-1 pool");
    }
}

Probability mle_single(const StageCounts& c)
{
    validate(c);
    if (c.n < 1) {
        throw DomainError("mle_single: need at least one pool");
    }
    if (c.s == c.n) {
        return 1.0;
    }
    if (c.k == 1) {
        return c.xbar();
    }
    // 1 - (1 - xbar)^(1/k)
    return -std::expm1(std::log1p(-c.xbar()) / c.k);
}

Probability mle_pooled_same_k(const TwoStageRecord& r)
{
    validate(r);
    if (r.stage2.n > 0 && r.stage1.k != r.stage2.k) {
        throw ContractError("mle_pooled_same_k: pool sizes differ, use mle_mixed");
    }
    StageCounts merged = r.stage1;
    merged.n += r.stage2.n;
    merged.s += r.stage2.s;
    return mle_single(merged);
}

double ScorePolynomial::operator()(double q) const
{
    return a * std::pow(q, k1 + k2) + b * std::pow(q, k1) + c * std::pow(q, k2) + d;
}

ScorePolynomial score_polynomial(const TwoStageRecord& r)
{
    validate(r);
    const double k1 = r.stage1.k;
    const double k2 = r.stage2.k;
    const double s1 = static_cast<double>(r.stage1.s);
    const double s2 = static_cast<double>(r.stage2.s);
    ScorePolynomial poly{};
    poly.k1 = r.stage1.k;
    poly.k2 = r.stage2.k;
    poly.d = k1 * (r.stage1.n - s1) + k2 * (r.stage2.n - s2);
    poly.c = -poly.d - k2 * s2;
    poly.b = -poly.d - k1 * s1;
    poly.a = poly.d + k1 * s1 + k2 * s2;
    return poly;
}

double log_likelihood(const TwoStageRecord& r, double p)
{
    validate(r);
    const double log_q = std::log1p(-p);
    const double s1 = static_cast<double>(r.stage1.s);
    const double s2 = static_cast<double>(r.stage2.s);
    const double d = static_cast<double>(r.stage1.k) * (r.stage1.n - r.stage1.s) +
                     static_cast<double>(r.stage2.k) * (r.stage2.n - r.stage2.s);
    double ll = 0.0;
    if (s1 > 0) {
        ll += s1 * std::log(one_minus_qk(log_q, r.stage1.k));
    }
    if (s2 > 0) {
        ll += s2 * std::log(one_minus_qk(log_q, r.stage2.k));
    }
    if (d > 0) {
        ll += d * log_q;
    }
    return ll;
}

double score(const TwoStageRecord& r, double p)
{
    validate(r);
    const double q = 1.0 - p;
    const double log_q = std::log1p(-p);
    const double d = static_cast<double>(r.stage1.k) * (r.stage1.n - r.stage1.s) +
                     static_cast<double>(r.stage2.k) * (r.stage2.n - r.stage2.s);
    auto term = [&](const StageCounts& c) {
        if (c.s == 0) {
            return 0.0;
        }
        return static_cast<double>(c.s) * c.k * std::exp((c.k - 1) * log_q) /
               one_minus_qk(log_q, c.k);
    };
    return term(r.stage1) + term(r.stage2) - d / q;
}

Probability mle_mixed(const TwoStageRecord& r)
{
    validate(r);
    const long long positives = r.stage1.s + r.stage2.s;
    if (positives == 0) {
        return 0.0;
    }
    if (positives == r.n2()) {
        return 1.0;
    }
    // The score is the Lemma polynomial divided by -q (1-q^k1)(1-q^k2), so it
    // has the same interior root without the spurious one at q = 1.
    const double p = find_root([&](double x) { return score(r, x); },
                               Bracket{kEdge, 1.0 - kEdge, 1e-15});
    return p;
}

double delta_bias(Probability p, int k)
{
    require_interior(p, "delta_bias");
    if (k < 1) {
        throw DomainError("delta_bias: pool size must be >= 1");
    }
    const double q = 1.0 - p;
    return (k - 1.0) / (2.0 * k * k) * q * inv_qk_minus_one(p, k);
}

double delta_var(Probability p, int k)
{
    require_interior(p, "delta_var");
    if (k < 1) {
        throw DomainError("delta_var: pool size must be >= 1");
    }
    if (k == 1) {
        return p * (1.0 - p);
    }
    const double q = 1.0 - p;
    return q * q * inv_qk_minus_one(p, k) / (static_cast<double>(k) * k);
}

double fisher_info_two_stage(Probability p, long long m, int k1, int k2, double expected_m2)
{
    require_interior(p, "fisher_info_two_stage");
    if (m < 0 || k1 < 1 || k2 < 1 || !(expected_m2 >= 0.0)) {
        throw DomainError("fisher_info_two_stage: need m >= 0, k >= 1, E(M) >= 0");
    }
    const double log_q = std::log1p(-p.value());
    auto per_pool = [&](int k) {
        return static_cast<double>(k) * k * std::exp((k - 2) * log_q) / one_minus_qk(log_q, k);
    };
    return static_cast<double>(m) * per_pool(k1) + expected_m2 * per_pool(k2);
}

double asymptotic_sd(double fisher_info)
{
    if (!(fisher_info > 0.0)) {
        throw DomainError("asymptotic_sd: Fisher information must be > 0");
    }
    return 1.0 / std::sqrt(fisher_info);
}

}  // namespace gtseq
