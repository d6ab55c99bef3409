#include "gtseq/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "gtseq/sequential.hpp"

namespace gtseq {

namespace {

std::uint64_t splitmix64(std::uint64_t& x)
{
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k)
{
    return (x << k) | (x >> (64 - k));
}

}  // namespace

Stream::Stream(std::uint64_t seed, std::uint64_t replicate)
{
    std::uint64_t x = seed;
    std::uint64_t key = splitmix64(x);
    x = key ^ (replicate * 0xD1B54A32D192ED03ULL);
    for (auto& w : s_) {
        w = splitmix64(x);
    }
}

std::uint64_t Stream::next()
{
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Stream::uniform()
{
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

bool bernoulli_group(Stream& stream, Probability p, int k)
{
    return stream.uniform() < theta_k(p, k);
}

std::string_view to_string(Procedure p)
{
    switch (p) {
    case Procedure::Sequential: return "sequential";
    case Procedure::TwoStageMle: return "twostage";
    case Procedure::TwoStageLinear: return "twostage-linear";
    case Procedure::Adaptive: return "adaptive";
    case Procedure::Fixed: return "fixed";
    }
    return "?";
}

Procedure procedure_from_string(std::string_view name)
{
    for (auto p : {Procedure::Sequential, Procedure::TwoStageMle, Procedure::TwoStageLinear,
                   Procedure::Adaptive, Procedure::Fixed}) {
        if (name == to_string(p)) {
            return p;
        }
    }
    if (name == "twostage-mle") {
        return Procedure::TwoStageMle;
    }
    throw DomainError("unknown procedure '" + std::string(name) + "'");
}

void validate(const SimulationSpec& spec)
{
    if (!(spec.p >= 0.0 && spec.p <= 1.0)) {
        throw DomainError("simulation: p must lie in [0,1]");
    }
    if (spec.replicates < 1) {
        throw DomainError("simulation: replicates must be >= 1");
    }
    if (spec.k < 1 || spec.k2 < 1) {
        throw DomainError("simulation: pool sizes must be >= 1");
    }
    switch (spec.procedure) {
    case Procedure::Sequential:
        validate(SequentialConfig{spec.k, spec.m, spec.design, spec.n_max});
        break;
    case Procedure::TwoStageMle:
    case Procedure::TwoStageLinear:
        if (spec.m < 1) {
            throw DomainError("simulation: two-stage m must be >= 1");
        }
        break;
    case Procedure::Adaptive:
        validate(spec.adaptive);
        break;
    case Procedure::Fixed:
        if (spec.m < 1 && !(spec.p > 0.0 && spec.p < 1.0)) {
            throw DomainError("simulation: fixed design needs m or 0 < p < 1");
        }
        break;
    }
}

namespace {

class StreamSource : public OutcomeSource {
public:
    StreamSource(Stream& s, double p) : stream_(s), p_(p) {}
    bool test(int k) override { return bernoulli_group(stream_, p_, k); }

private:
    Stream& stream_;
    double p_;
};

StageCounts draw_stage(Stream& stream, double theta, int k, long long n)
{
    StageCounts c{k, n, 0};
    for (long long i = 0; i < n; ++i) {
        c.s += stream.uniform() < theta ? 1 : 0;
    }
    return c;
}

}  // namespace

ReplicateResult run_replicate(const SimulationSpec& spec, std::uint64_t replicate)
{
    Stream stream(spec.seed, replicate);
    ReplicateResult out;

    switch (spec.procedure) {
    case Procedure::Sequential: {
        const SequentialConfig cfg{spec.k, spec.m, spec.design, spec.n_max};
        const double theta = theta_k(spec.p, spec.k);
        SequentialState state = initial_state();
        while (!state.stopped) {
            state = advance(state, stream.uniform() < theta, cfg);
        }
        out.n = state.n;
        out.p_hat = state.p_hat;
        out.flagged = state.truncated;
        break;
    }
    case Procedure::TwoStageMle:
    case Procedure::TwoStageLinear: {
        TwoStageConfig cfg;
        cfg.m = spec.m;
        cfg.k1 = spec.k;
        cfg.design = spec.design;
        cfg.k2_rule = spec.k2_rule;
        cfg.k2 = spec.k2;
        validate(cfg);
        TwoStageRecord rec;
        rec.stage1 = draw_stage(stream, theta_k(spec.p, spec.k), spec.k, spec.m);
        const Stage2Plan plan =
            stage2_size(spec.m, spec.k, rec.stage1.xbar(), spec.design, cfg.stage2_cap_factor);
        const int k2 = stage2_pool_size(mle_single(rec.stage1), cfg);
        rec.stage2 = draw_stage(stream, theta_k(spec.p, k2), k2, plan.m2);
        out.n = rec.n2();
        out.p_hat = spec.procedure == Procedure::TwoStageMle ? mle_mixed(rec).value()
                                                             : linear_combo(rec).value();
        out.flagged = plan.capped;
        break;
    }
    case Procedure::Adaptive: {
        AdaptiveConfig cfg = spec.adaptive;
        cfg.design = spec.design;
        StreamSource source(stream, spec.p);
        const AdaptiveResult res = run_adaptive(source, cfg);
        out.n = res.n3;
        out.p_hat = res.p_hat_final;
        out.flagged = res.degenerate_pilot || res.truncated;
        break;
    }
    case Procedure::Fixed: {
        const long long n =
            spec.m > 0 ? spec.m : n_star_group(spec.p, spec.k, spec.design).n_ceil;
        const StageCounts c = draw_stage(stream, theta_k(spec.p, spec.k), spec.k, n);
        out.n = n;
        out.p_hat = mle_single(c);
        break;
    }
    }
    return out;
}

SimulationSummary summarize(const std::vector<ReplicateResult>& results, double p, double gamma)
{
    SimulationSummary s;
    const auto r = static_cast<double>(results.size());
    s.replicates = static_cast<long long>(results.size());
    if (results.empty()) {
        return s;
    }
    double covered = 0.0;
    for (const auto& x : results) {
        s.E_N += static_cast<double>(x.n);
        s.E_phat += x.p_hat;
        covered += std::abs(x.p_hat - p) < gamma * p ? 1.0 : 0.0;
        s.flagged += x.flagged ? 1 : 0;
    }
    s.E_N /= r;
    s.E_phat /= r;
    s.CP = covered / r;

    double ss_n = 0.0;
    double ss_p = 0.0;
    for (const auto& x : results) {
        ss_n += (static_cast<double>(x.n) - s.E_N) * (static_cast<double>(x.n) - s.E_N);
        ss_p += (x.p_hat - s.E_phat) * (x.p_hat - s.E_phat);
    }
    const double denom = r > 1.0 ? r - 1.0 : 1.0;
    s.sd_N = std::sqrt(ss_n / denom);
    s.sd_phat = std::sqrt(ss_p / denom);

    s.mc_se_E_N = s.sd_N / std::sqrt(r);
    s.mc_se_E_phat = s.sd_phat / std::sqrt(r);
    // Normal-theory SE of a sample standard deviation.
    s.mc_se_sd_N = s.sd_N / std::sqrt(2.0 * denom);
    s.mc_se_sd_phat = s.sd_phat / std::sqrt(2.0 * denom);
    s.mc_se_CP = std::sqrt(s.CP * (1.0 - s.CP) / r);
    return s;
}

SimulationSummary run(const SimulationSpec& spec)
{
    validate(spec);
    const auto count = static_cast<std::size_t>(spec.replicates);
    std::vector<ReplicateResult> results(count);

    unsigned threads = spec.threads == 0 ? std::thread::hardware_concurrency() : spec.threads;
    threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(std::min<std::size_t>(count, 256)));

    // Results are stored by replicate index, so the reduction below sees the
    // same sequence whatever the thread count.
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            results[i] = run_replicate(spec, i);
        }
    };
    if (threads == 1) {
        work(0, count);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        const std::size_t chunk = (count + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t begin = std::min(count, t * chunk);
            const std::size_t end = std::min(count, begin + chunk);
            pool.emplace_back([&, t, begin, end] {
                try {
                    work(begin, end);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
        for (auto& e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    }
    return summarize(results, spec.p, spec.design.gamma());
}

std::vector<FieldComparison> compare(const SummaryFields& reference,
                                     const SimulationSummary& simulated)
{
    const struct {
        const char* name;
        double ref;
        double sim;
        double se;
    } rows[] = {
        {"E_N", reference.E_N, simulated.E_N, simulated.mc_se_E_N},
        {"sd_N", reference.sd_N, simulated.sd_N, simulated.mc_se_sd_N},
        {"E_phat", reference.E_phat, simulated.E_phat, simulated.mc_se_E_phat},
        {"sd_phat", reference.sd_phat, simulated.sd_phat, simulated.mc_se_sd_phat},
        {"CP", reference.CP, simulated.CP, simulated.mc_se_CP},
    };
    std::vector<FieldComparison> out;
    for (const auto& row : rows) {
        if (std::isnan(row.ref)) {
            continue;
        }
        FieldComparison c{row.name, row.ref, row.sim, row.se, 0.0, false};
        const double diff = row.sim - row.ref;
        if (row.se > 0.0) {
            c.z = diff / row.se;
        } else if (diff != 0.0) {
            c.z = std::copysign(std::numeric_limits<double>::infinity(), diff);
        }
        c.flagged = std::abs(c.z) > 3.0;
        out.push_back(c);
    }
    return out;
}

}  // namespace gtseq
