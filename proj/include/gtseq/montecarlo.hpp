#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gtseq/adaptive.hpp"
#include "gtseq/design.hpp"
#include "gtseq/twostage.hpp"

namespace gtseq {

/// xoshiro256** seeded through splitmix64. Each replicate owns one stream.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t replicate);

    std::uint64_t next();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

private:
    std::uint64_t s_[4];
};

/// One pool of size k: positive with probability theta_k(p).
bool bernoulli_group(Stream& stream, Probability p, int k);

enum class Procedure { Sequential, TwoStageMle, TwoStageLinear, Adaptive, Fixed };

std::string_view to_string(Procedure p);
Procedure procedure_from_string(std::string_view name);

struct SimulationSpec {
    Procedure procedure = Procedure::Sequential;
    double p = 0.5;
    DesignParams design;
    /// Pool size (stage-1 size for the two-stage procedures). For Fixed, the
    /// pool count is ceil(n*_G(p, k)) unless m is positive.
    int k = 1;
    long long m = 0;
    long long n_max = 1'000'000;
    Stage2PoolRule k2_rule = Stage2PoolRule::OptimalFromStage1;
    int k2 = 1;
    AdaptiveConfig adaptive;
    long long replicates = 1000;
    std::uint64_t seed = 1;
    /// 0 picks the hardware concurrency. Never changes the result.
    unsigned threads = 0;
};

void validate(const SimulationSpec& spec);

/// Outcome of one replicate.
struct ReplicateResult {
    long long n = 0;
    double p_hat = 0.0;
    bool flagged = false;
};

ReplicateResult run_replicate(const SimulationSpec& spec, std::uint64_t replicate);

struct SimulationSummary {
    double E_N = 0.0;
    double sd_N = 0.0;
    double E_phat = 0.0;
    double sd_phat = 0.0;
    double CP = 0.0;

    double mc_se_E_N = 0.0;
    double mc_se_sd_N = 0.0;
    double mc_se_E_phat = 0.0;
    double mc_se_sd_phat = 0.0;
    double mc_se_CP = 0.0;

    long long replicates = 0;
    /// Replicates that hit a horizon, a stage-2 cap or a degenerate pilot.
    long long flagged = 0;

    friend bool operator==(const SimulationSummary&, const SimulationSummary&) = default;
};

SimulationSummary summarize(const std::vector<ReplicateResult>& results, double p, double gamma);

SimulationSummary run(const SimulationSpec& spec);

/// Point values to compare against a simulation; NaN marks a missing field.
struct SummaryFields {
    double E_N;
    double sd_N;
    double E_phat;
    double sd_phat;
    double CP;
};

struct FieldComparison {
    std::string field;
    double reference = 0.0;
    double simulated = 0.0;
    double mc_se = 0.0;
    double z = 0.0;
    bool flagged = false;
};

/// z-scores of simulated minus reference in units of the simulation's
/// Monte Carlo standard error; |z| > 3 is flagged.
std::vector<FieldComparison> compare(const SummaryFields& reference,
                                     const SimulationSummary& simulated);

}  // namespace gtseq
