#include "gtseq/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>

#include "gtseq/estimation.hpp"
#include "gtseq/io.hpp"
#include "gtseq/montecarlo.hpp"
#include "gtseq/sequential.hpp"
#include "gtseq/session.hpp"
#include "gtseq/tables.hpp"
#include "gtseq/twostage.hpp"

namespace gtseq {

namespace {

using nlohmann::json;

/// A flag was raised (horizon, cap, truncation); output is still printed.
struct Flagged {
    std::string message;
};

const CLI::Validator kOpenUnit =
    CLI::Validator([](std::string& s) -> std::string {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used == s.size() && v > 0.0 && v < 1.0) {
                return {};
            }
        } catch (const std::exception&) {
        }
        return "value " + s + " must lie strictly between 0 and 1";
    }, "(0,1)");

const CLI::Validator kPoolSize =
    CLI::Validator([](std::string& s) -> std::string {
        if (s == "auto") {
            return {};
        }
        try {
            std::size_t used = 0;
            const int v = std::stoi(s, &used);
            if (used == s.size() && v >= 1) {
                return {};
            }
        } catch (const std::exception&) {
        }
        return "pool size must be a positive integer or 'auto'";
    }, "INT|auto");

struct Common {
    double alpha = 0.05;
    double gamma = 0.1;
    std::string format = "text";
    std::string out_path;
};

void add_design_options(CLI::App* cmd, Common& c)
{
    cmd->add_option("--alpha", c.alpha, "risk alpha")->check(kOpenUnit)->capture_default_str();
    cmd->add_option("--gamma", c.gamma, "proportional half-width")
        ->check(kOpenUnit)
        ->capture_default_str();
}

int resolve_k(const std::string& k, double p, const DesignParams& d)
{
    if (k == "auto") {
        return optimal_group_size(p, d).k;
    }
    return std::stoi(k);
}

// Key/value block used by the text layouts.
class Block {
public:
    void add(const std::string& key, const std::string& value) { rows_.emplace_back(key, value); }
    void count(const std::string& key, double v) { add(key, format_fixed(v, 2)); }
    void prob(const std::string& key, double v, int decimals = 4)
    {
        add(key, format_fixed(v, decimals));
    }
    void integer(const std::string& key, long long v) { add(key, std::to_string(v)); }

    std::string str() const
    {
        std::size_t w = 0;
        for (const auto& [k, v] : rows_) {
            w = std::max(w, k.size());
        }
        std::ostringstream out;
        for (const auto& [k, v] : rows_) {
            out << k << std::string(w + 2 - k.size(), ' ') << v << "\n";
        }
        return out.str();
    }

private:
    std::vector<std::pair<std::string, std::string>> rows_;
};

void emit(const Common& c, const std::string& text, std::ostream& out)
{
    if (c.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(c.out_path, std::ios::binary);
    if (!file) {
        throw DomainError("cannot write " + c.out_path);
    }
    file << text;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err)
{
    CLI::App app{"Group testing prevalence estimation with proportional closeness", "gtseq"};
    app.require_subcommand(1);

    Common common;
    double p = 0.0;
    std::string k_opt = "auto";
    long long m = 0;
    std::optional<int> k2;
    long long m0 = 100;
    int k0 = 2;
    long long replicates = 1000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    long long n_max = 1'000'000;
    std::string procedure;
    int table_id = 0;
    std::string host = "127.0.0.1";
    int port = 8080;

    auto* design = app.add_subcommand("design", "pool size and required number of pools");
    design->add_option("--p", p, "prevalence")->required()->check(kOpenUnit);
    design->add_option("--k", k_opt, "pool size or 'auto'")->check(kPoolSize)->capture_default_str();
    add_design_options(design, common);
    design->add_option("--format", common.format)->check(CLI::IsMember({"text", "json"}));

    auto* analyze = app.add_subcommand("analyze", "analytic approximations");
    analyze->add_option("procedure", procedure)
        ->required()
        ->check(CLI::IsMember({"sequential", "fisher", "twostage-linear"}));
    analyze->add_option("--p", p, "prevalence")->required()->check(kOpenUnit);
    analyze->add_option("--k", k_opt, "pool size (stage 1) or 'auto'")->check(kPoolSize);
    analyze->add_option("--m", m, "initial number of pools")->check(CLI::PositiveNumber);
    analyze->add_option("--k2", k2, "stage-2 pool size (default: k)")->check(CLI::PositiveNumber);
    add_design_options(analyze, common);
    analyze->add_option("--format", common.format)->check(CLI::IsMember({"text", "json"}));

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo simulation");
    simulate->add_option("procedure", procedure)
        ->required()
        ->check(CLI::IsMember(
            {"sequential", "twostage", "twostage-mle", "twostage-linear", "adaptive", "fixed"}));
    simulate->add_option("--p", p, "true prevalence")->required()->check(kOpenUnit);
    simulate->add_option("--k", k_opt, "pool size (stage 1) or 'auto'")->check(kPoolSize);
    simulate->add_option("--m", m, "initial number of pools")->check(CLI::PositiveNumber);
    simulate->add_option("--k2", k2, "fixed stage-2 pool size (default: optimal for p_hat_1)")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--m0", m0, "adaptive pilot pools")->check(CLI::PositiveNumber);
    simulate->add_option("--k0", k0, "adaptive pilot pool size")->check(CLI::PositiveNumber);
    simulate->add_option("--n-max", n_max, "sequential truncation horizon")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--replicates", replicates)->check(CLI::PositiveNumber);
    simulate->add_option("--seed", seed);
    simulate->add_option("--threads", threads, "worker threads (0 = all cores)");
    add_design_options(simulate, common);
    simulate->add_option("--format", common.format)
        ->check(CLI::IsMember({"text", "json", "csv"}));
    simulate->add_option("--out", common.out_path, "write output to a file");

    auto* table = app.add_subcommand("table", "reproduce a table of the study");
    table->add_option("id", table_id)->required()->check(CLI::Range(1, 7));
    add_design_options(table, common);
    table->add_option("--replicates", replicates)->check(CLI::PositiveNumber);
    table->add_option("--seed", seed);
    table->add_option("--threads", threads);
    table->add_option("--format", common.format)->check(CLI::IsMember({"text", "csv"}));
    table->add_option("--out", common.out_path, "also write the CSV to a file");

    auto* session = app.add_subcommand("session", "run a sequential study from the terminal");
    session->add_option("--k", k_opt, "pool size")->required()->check(kPoolSize);
    session->add_option("--m", m, "initial number of pools")->required()->check(CLI::PositiveNumber);
    session->add_option("--n-max", n_max)->check(CLI::PositiveNumber);
    add_design_options(session, common);

    auto* serve = app.add_subcommand("serve", "local JSON service for the session UI");
    serve->add_option("--host", host)->capture_default_str();
    serve->add_option("--port", port)->check(CLI::Range(1, 65535))->capture_default_str();

    std::vector<std::string> argv_store = {"gtseq"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) {
        argv.push_back(a.data());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const DesignParams d(common.alpha, common.gamma);

        if (*design) {
            const GroupPlan plan =
                k_opt == "auto" ? optimal_group_size(p, d) : n_star_group(p, std::stoi(k_opt), d);
            if (common.format == "json") {
                out << json(plan).dump() << "\n";
            } else {
                Block b;
                b.integer("k", plan.k);
                b.count("n_required", plan.n_required);
                b.integer("n_ceil", plan.n_ceil);
                out << b.str();
            }
            return kExitOk;
        }

        if (*analyze) {
            const int k = resolve_k(k_opt, p, d);
            if (procedure == "sequential") {
                if (m == 0) {
                    for (const auto& pr : kSequentialPresets) {
                        if (pr.p == p && pr.k == k) {
                            m = pr.m;
                        }
                    }
                }
                if (m == 0) {
                    err << "analyze sequential: --m is required (no preset for this p and k)\n";
                    return kExitUsage;
                }
                const SequentialAnalysis a = analyze_sequential(p, k, m, d);
                if (common.format == "json") {
                    out << json(a).dump() << "\n";
                } else {
                    Block b;
                    b.integer("k", k);
                    b.integer("m", m);
                    b.count("E(N)", a.n.mean);
                    b.count("sd(N)", a.n.sd);
                    b.prob("E(p_hat)", a.estimate.mean);
                    b.prob("sd(p_hat)", a.estimate.sd);
                    b.prob("CP", a.cp);
                    out << b.str();
                }
                return kExitOk;
            }
            if (m == 0) {
                err << "analyze " << procedure << ": --m is required\n";
                return kExitUsage;
            }
            const int kk2 = k2.value_or(k);
            const N2Distribution n2 = n2_distribution(p, m, k, d);
            if (procedure == "fisher") {
                const double em = n2.expected_stage2(m);
                const double fi = fisher_info_two_stage(p, m, k, kk2, em);
                const double sd = asymptotic_sd(fi);
                if (common.format == "json") {
                    out << json{{"k1", k}, {"k2", kk2}, {"m", m}, {"E_N2", n2.mean},
                                {"E_M", em}, {"FI", fi}, {"sd", sd}}.dump()
                        << "\n";
                } else {
                    Block b;
                    b.integer("k1", k);
                    b.integer("k2", kk2);
                    b.integer("m", m);
                    b.count("E(N2)", n2.mean);
                    b.count("E(M)", em);
                    b.count("FI", fi);
                    b.prob("sd(p_hat)", sd, 5);
                    out << b.str();
                }
                return kExitOk;
            }
            const LinearComboMoments mo = linear_combo_moments(p, m, k, kk2, d);
            const double cp = linear_combo_coverage(p, mo.mean, mo.se, d.gamma());
            if (common.format == "json") {
                out << json{{"k1", k}, {"k2", kk2}, {"m", m}, {"E_N2", n2.mean},
                            {"sd_N2", n2.sd}, {"moments", mo}, {"CP", cp}}.dump()
                    << "\n";
            } else {
                Block b;
                b.integer("k1", k);
                b.integer("k2", kk2);
                b.integer("m", m);
                b.count("E(N2)", n2.mean);
                b.count("sd(N2)", n2.sd);
                b.prob("E(p_hat)", mo.mean);
                b.prob("SE(p_hat)", mo.se, 5);
                b.prob("CP", cp);
                out << b.str();
            }
            return kExitOk;
        }

        if (*simulate) {
            SimulationSpec spec;
            spec.procedure = procedure_from_string(procedure);
            spec.p = p;
            spec.design = d;
            spec.replicates = replicates;
            spec.seed = seed;
            spec.threads = threads;
            spec.n_max = n_max;
            spec.adaptive.m0 = m0;
            spec.adaptive.k0 = k0;
            if (spec.procedure != Procedure::Adaptive) {
                spec.k = resolve_k(k_opt, p, d);
                spec.m = m;
            } else {
                spec.k = k0;
                spec.m = m0;
            }
            if (k2) {
                spec.k2_rule = Stage2PoolRule::Fixed;
                spec.k2 = *k2;
            }
            if (spec.procedure == Procedure::Sequential && spec.m == 0) {
                for (const auto& pr : kSequentialPresets) {
                    if (pr.p == p && pr.k == spec.k) {
                        spec.m = pr.m;
                    }
                }
            }
            if ((spec.procedure == Procedure::Sequential ||
                 spec.procedure == Procedure::TwoStageMle ||
                 spec.procedure == Procedure::TwoStageLinear) &&
                spec.m == 0) {
                err << "simulate " << procedure << ": --m is required\n";
                return kExitUsage;
            }
            const SimulationSummary s = run(spec);

            std::string text;
            if (common.format == "json") {
                json j{{"procedure", to_string(spec.procedure)},
                       {"p", spec.p},
                       {"k", spec.k},
                       {"m", spec.m},
                       {"alpha", d.alpha()},
                       {"gamma", d.gamma()},
                       {"replicates", spec.replicates},
                       {"seed", spec.seed},
                       {"summary", s}};
                text = j.dump(2) + "\n";
            } else if (common.format == "csv") {
                text = std::string(kSimulationCsvHeader) + "\n" + simulation_csv_row(spec, s) + "\n";
            } else {
                Block b;
                b.add("procedure", std::string(to_string(spec.procedure)));
                b.prob("p", spec.p);
                b.integer(spec.procedure == Procedure::Adaptive ? "k0" : "k", spec.k);
                b.integer(spec.procedure == Procedure::Adaptive ? "m0" : "m", spec.m);
                b.integer("replicates", spec.replicates);
                b.add("seed", std::to_string(spec.seed));
                b.add("E(N)", format_fixed(s.E_N, 2) + "  (mc se " + format_fixed(s.mc_se_E_N, 2) + ")");
                b.add("sd(N)", format_fixed(s.sd_N, 2) + "  (mc se " + format_fixed(s.mc_se_sd_N, 2) + ")");
                b.add("E(p_hat)",
                      format_fixed(s.E_phat, 4) + "  (mc se " + format_fixed(s.mc_se_E_phat, 5) + ")");
                b.add("sd(p_hat)",
                      format_fixed(s.sd_phat, 4) + "  (mc se " + format_fixed(s.mc_se_sd_phat, 5) + ")");
                b.add("CP", format_fixed(s.CP, 4) + "  (mc se " + format_fixed(s.mc_se_CP, 4) + ")");
                b.integer("flagged", s.flagged);
                text = b.str();
            }
            emit(common, text, out);
            if (s.flagged > 0) {
                throw Flagged{std::to_string(s.flagged) +
                              " replicate(s) hit a horizon, stage-2 cap or degenerate pilot"};
            }
            return kExitOk;
        }

        if (*table) {
            TableRequest req;
            req.id = table_id;
            req.design = d;
            req.replicates = replicates;
            req.seed = seed;
            req.threads = threads;
            const Table t = make_table(req);
            if (common.format == "csv") {
                out << render_csv(t);
            } else {
                out << render_text(t);
            }
            if (!common.out_path.empty()) {
                Common csv = common;
                emit(csv, render_csv(t), out);
            }
            return kExitOk;
        }

        if (*session) {
            const SequentialConfig cfg{std::stoi(k_opt == "auto" ? "0" : k_opt), m, d, n_max};
            validate(cfg);
            SequentialState state = initial_state();
            std::string line;
            out << "enter 1 (positive) or 0 (negative) per pool, q to quit\n";
            while (!state.stopped && std::getline(in, line)) {
                if (line == "q") {
                    break;
                }
                if (line != "0" && line != "1") {
                    err << "expected 0, 1 or q\n";
                    continue;
                }
                state = advance(state, line == "1", cfg);
                out << "n=" << state.n << " s=" << state.s << " xbar=" << format_fixed(state.xbar(), 4)
                    << " p_hat=" << format_fixed(state.p_hat, 4) << " threshold="
                    << (std::isfinite(state.threshold) ? format_fixed(state.threshold, 2) : "inf")
                    << (state.stopped ? " STOP" : " continue") << "\n";
            }
            if (state.truncated) {
                throw Flagged{"horizon reached without meeting the stopping rule"};
            }
            return kExitOk;
        }

        if (*serve) {
            httplib::Server server;
            SessionRegistry registry;
            register_routes(server, registry);
            if (!server.bind_to_port(host, port)) {
                err << "cannot listen on " << host << ":" << port << "\n";
                return kExitDomain;
            }
            err << "serving on http://" << host << ":" << port << "\n";
            server.listen_after_bind();
            return kExitOk;
        }
    } catch (const Flagged& f) {
        err << "warning: " << f.message << "\n";
        return kExitFlagged;
    } catch (const HorizonError& e) {
        err << "error: " << e.what() << "\n";
        return kExitFlagged;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitUsage;
}

}  // namespace gtseq
