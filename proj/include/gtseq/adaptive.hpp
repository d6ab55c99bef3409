#pragma once

#include "gtseq/design.hpp"
#include "gtseq/estimation.hpp"

namespace gtseq {

struct AdaptiveConfig {
    long long m0 = 100;
    int k0 = 2;
    DesignParams design;
    /// Phase-2 initial count is ceil(m_fraction * n*_G(p_hat0, k)).
    double m_fraction = 1.0;
    /// Phase 2 is truncated at horizon_factor * m pools.
    double horizon_factor = 4.0;
    int k_max = kDefaultMaxPoolSize;
};

void validate(const AdaptiveConfig& cfg);

/// Supplies the result of testing one pool of the requested size.
class OutcomeSource {
public:
    virtual ~OutcomeSource() = default;
    virtual bool test(int k) = 0;
};

struct PhaseTwoDesign {
    int k = 1;
    long long m = 1;

    friend bool operator==(const PhaseTwoDesign&, const PhaseTwoDesign&) = default;
};

PhaseTwoDesign choose_k_m(Probability p_hat0, const AdaptiveConfig& cfg);

struct AdaptiveResult {
    StageCounts pilot;
    StageCounts phase2;
    Probability p_hat0;
    int k = 0;
    long long m = 0;
    long long n3 = 0;
    Probability p_hat_final;
    /// Both pilots were all-negative or all-positive; no phase 2 was run.
    bool degenerate_pilot = false;
    /// Phase 2 hit its horizon without meeting the stopping rule.
    bool truncated = false;
};

AdaptiveResult run_adaptive(OutcomeSource& outcomes, const AdaptiveConfig& cfg);

}  // namespace gtseq
