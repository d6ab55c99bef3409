#include "gtseq/tables.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gtseq/estimation.hpp"
#include "gtseq/io.hpp"
#include "gtseq/montecarlo.hpp"
#include "gtseq/sequential.hpp"
#include "gtseq/twostage.hpp"

namespace gtseq {

namespace {

Cell num(double v, int decimals)
{
    return Cell{v, decimals, false, {}};
}

Cell integer(long long v)
{
    return Cell{static_cast<double>(v), -1, false, {}};
}

Cell label(std::string s)
{
    return Cell{0.0, 0, true, std::move(s)};
}

SimulationSpec base_spec(const TableRequest& req, Procedure proc, double p)
{
    SimulationSpec s;
    s.procedure = proc;
    s.p = p;
    s.design = req.design;
    s.replicates = req.replicates;
    s.seed = req.seed;
    s.threads = req.threads;
    return s;
}

void add_mc_columns(std::vector<Cell>& row, const SimulationSummary& s)
{
    row.push_back(num(s.mc_se_E_N, 2));
    row.push_back(num(s.mc_se_E_phat, 5));
    row.push_back(num(s.mc_se_CP, 4));
}

Table table1(const TableRequest& req)
{
    Table t;
    t.title = "Required sample size, individual testing";
    t.columns = {"p", "n*", "n*_ceil"};
    for (double p : {0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
        const double n = n_star_individual(p, req.design);
        t.rows.push_back({num(p, 2), num(n, 2), integer(n_star_group(p, 1, req.design).n_ceil)});
    }
    return t;
}

Table table2(const TableRequest& req)
{
    struct Row {
        double p;
        std::vector<int> ks;
    };
    const Row grid[] = {
        {0.01, {1, 50, 100, 158, 159, 160, 170, 200}},
        {0.05, {1, 10, 20, 30, 31, 32, 33, 40}},
        {0.10, {1, 10, 11, 12, 13, 14, 15, 16}},
        {0.20, {1, 6, 7, 8, 9, 10, 11, 12}},
        {0.30, {1, 2, 3, 4, 5, 6, 7, 8}},
        {0.40, {1, 2, 3, 4, 5, 6, 7}},
        {0.50, {1, 2, 3, 4, 5, 6, 7}},
    };
    Table t;
    t.title = "Minimal number of groups required";
    t.columns = {"p", "k", "n*_G", "optimal"};
    for (const auto& row : grid) {
        const GroupPlan best = optimal_group_size(row.p, req.design);
        for (int k : row.ks) {
            const GroupPlan plan = n_star_group(row.p, k, req.design);
            t.rows.push_back({num(row.p, 2), integer(k), num(plan.n_required, 2),
                              label(k == best.k ? "*" : "")});
        }
    }
    return t;
}

Table table3(const TableRequest& req)
{
    Table t;
    t.title = "Sequential procedure (A = analytic, S = simulated)";
    t.columns = {"", "p", "k", "m", "E(N)", "sd(N)", "E(p_hat)", "sd(p_hat)", "CP",
                 "se E(N)", "se E(p_hat)", "se CP"};
    for (const auto& pr : kSequentialPresets) {
        const SequentialAnalysis a = analyze_sequential(pr.p, pr.k, pr.m, req.design);
        t.rows.push_back({label("A"), num(pr.p, 2), integer(pr.k), integer(pr.m),
                          num(a.n.mean, 2), num(a.n.sd, 2), num(a.estimate.mean, 4),
                          num(a.estimate.sd, 4), num(a.cp, 4), label(""), label(""), label("")});

        SimulationSpec spec = base_spec(req, Procedure::Sequential, pr.p);
        spec.k = pr.k;
        spec.m = pr.m;
        const SimulationSummary s = run(spec);
        std::vector<Cell> row = {label("S"), num(pr.p, 2), integer(pr.k), integer(pr.m),
                                 num(s.E_N, 2), num(s.sd_N, 2), num(s.E_phat, 4),
                                 num(s.sd_phat, 4), num(s.CP, 4)};
        add_mc_columns(row, s);
        t.rows.push_back(std::move(row));
    }
    return t;
}

struct TwoStageRow {
    double p;
    int k1;
    long long m;
};

constexpr TwoStageRow kTable4Rows[] = {
    {0.5, 2, 100}, {0.5, 2, 200}, {0.4, 2, 100}, {0.4, 3, 200},  {0.3, 2, 100},   {0.3, 4, 300},
    {0.2, 2, 100}, {0.2, 7, 400}, {0.1, 2, 100}, {0.1, 15, 500}, {0.05, 2, 100}, {0.05, 31, 500},
};

struct FisherRow {
    double p;
    long long m;
    int k1;
    int k2;
};

constexpr FisherRow kFisherRows[] = {
    {0.5, 200, 2, 3}, {0.4, 200, 3, 3},   {0.3, 300, 4, 4},
    {0.2, 400, 7, 7}, {0.1, 500, 15, 16}, {0.05, 500, 31, 31},
};

Table table4(const TableRequest& req)
{
    Table t;
    t.title = "Two-stage procedure, grand MLE (simulated)";
    t.columns = {"p", "k1", "m", "E(N2)", "sd(N2)", "E(p_hat)", "sd(p_hat)", "CP",
                 "se E(N2)", "se E(p_hat)", "se CP", "flagged"};
    for (const auto& r : kTable4Rows) {
        SimulationSpec spec = base_spec(req, Procedure::TwoStageMle, r.p);
        spec.k = r.k1;
        spec.m = r.m;
        const SimulationSummary s = run(spec);
        std::vector<Cell> row = {num(r.p, 2),      integer(r.k1),      integer(r.m),
                                 num(s.E_N, 3),    num(s.sd_N, 3),     num(s.E_phat, 4),
                                 num(s.sd_phat, 4), num(s.CP, 3)};
        add_mc_columns(row, s);
        row.push_back(integer(s.flagged));
        t.rows.push_back(std::move(row));
    }
    t.notes.push_back("stage-2 pool size chosen as the optimal k for the stage-1 estimate");
    return t;
}

Table table5(const TableRequest& req)
{
    Table t;
    t.title = "Fisher information and asymptotic SD, two-stage";
    t.columns = {"p", "m", "k1", "k2", "E(M)", "FI", "sd(p_hat)"};
    for (const auto& r : kFisherRows) {
        const N2Distribution n2 = n2_distribution(r.p, r.m, r.k1, req.design);
        const double em = n2.expected_stage2(r.m);
        const double fi = fisher_info_two_stage(r.p, r.m, r.k1, r.k2, em);
        t.rows.push_back({num(r.p, 2), integer(r.m), integer(r.k1), integer(r.k2), num(em, 2),
                          num(fi, 2), num(asymptotic_sd(fi), 5)});
    }
    t.notes.push_back("E(M) = E(N2) - m from the normal approximation to N2");
    return t;
}

Table table6(const TableRequest& req)
{
    Table t;
    t.title = "Two-stage linear combination of MLEs (E = delta method, S = simulated)";
    t.columns = {"", "p", "k1", "m", "k2", "E(N2)", "sd(N2)", "E(p_hat)", "SE(p_hat)", "CP",
                 "se E(N2)", "se E(p_hat)", "se CP"};
    for (const auto& r : kFisherRows) {
        const N2Distribution n2 = n2_distribution(r.p, r.m, r.k1, req.design);
        const LinearComboMoments mo = linear_combo_moments(r.p, r.m, r.k1, r.k2, req.design);
        const double cp = linear_combo_coverage(r.p, mo.mean, mo.se, req.design.gamma());
        t.rows.push_back({label("E"), num(r.p, 2), integer(r.k1), integer(r.m), integer(r.k2),
                          num(n2.mean, 2), num(n2.sd, 3), num(mo.mean, 4), num(mo.se, 5),
                          num(cp, 3), label(""), label(""), label("")});

        SimulationSpec spec = base_spec(req, Procedure::TwoStageLinear, r.p);
        spec.k = r.k1;
        spec.m = r.m;
        const SimulationSummary s = run(spec);
        std::vector<Cell> row = {label("S"),      num(r.p, 2),       integer(r.k1),
                                 integer(r.m),    label("opt"),      num(s.E_N, 2),
                                 num(s.sd_N, 3),  num(s.E_phat, 4),  num(s.sd_phat, 5),
                                 num(s.CP, 3)};
        add_mc_columns(row, s);
        t.rows.push_back(std::move(row));
    }
    t.notes.push_back("E rows hold k2 fixed; S rows choose k2 from the stage-1 estimate");
    return t;
}

Table table7(const TableRequest& req)
{
    Table t;
    t.title = "Adaptive sequential procedure (simulated)";
    t.columns = {"p", "k0", "m0", "E(N3)", "sd(N3)", "E(p_hat)", "sd(p_hat)", "CP",
                 "se E(N3)", "se E(p_hat)", "se CP", "flagged"};
    for (double p : {0.5, 0.4, 0.3, 0.2, 0.1, 0.05, 0.01}) {
        SimulationSpec spec = base_spec(req, Procedure::Adaptive, p);
        const SimulationSummary s = run(spec);
        std::vector<Cell> row = {num(p, 2),        integer(spec.adaptive.k0),
                                 integer(spec.adaptive.m0), num(s.E_N, 3),
                                 num(s.sd_N, 3),   num(s.E_phat, 4),
                                 num(s.sd_phat, 4), num(s.CP, 3)};
        add_mc_columns(row, s);
        row.push_back(integer(s.flagged));
        t.rows.push_back(std::move(row));
    }
    t.notes.push_back("final estimate is the mixed-k MLE over pilot and sequential phase");
    return t;
}

std::string cell_text(const Cell& c)
{
    if (c.is_text) {
        return c.text;
    }
    if (c.decimals < 0) {
        return format_fixed(c.value, 0);
    }
    return format_fixed(c.value, c.decimals);
}

}  // namespace

Table make_table(const TableRequest& req)
{
    Table t;
    switch (req.id) {
    case 1: t = table1(req); break;
    case 2: t = table2(req); break;
    case 3: t = table3(req); break;
    case 4: t = table4(req); break;
    case 5: t = table5(req); break;
    case 6: t = table6(req); break;
    case 7: t = table7(req); break;
    default: throw DomainError("unknown table id " + std::to_string(req.id));
    }
    t.id = req.id;
    if (!(req.design == DesignParams{})) {
        std::ostringstream note;
        note << "extrapolation: alpha=" << req.design.alpha() << " gamma=" << req.design.gamma()
             << " (not a published configuration)";
        t.notes.insert(t.notes.begin(), note.str());
    }
    if (req.id == 3 || req.id == 4 || req.id == 6 || req.id == 7) {
        std::ostringstream note;
        note << "simulation: " << req.replicates << " replicates, seed " << req.seed;
        t.notes.push_back(note.str());
    }
    return t;
}

std::string render_text(const Table& t)
{
    std::vector<std::vector<std::string>> cells;
    cells.push_back(t.columns);
    for (const auto& row : t.rows) {
        std::vector<std::string> line;
        for (const auto& c : row) {
            line.push_back(cell_text(c));
        }
        cells.push_back(std::move(line));
    }
    std::vector<std::size_t> width(t.columns.size(), 0);
    for (const auto& line : cells) {
        for (std::size_t i = 0; i < line.size() && i < width.size(); ++i) {
            width[i] = std::max(width[i], line[i].size());
        }
    }
    std::ostringstream out;
    out << "Table " << t.id << ": " << t.title << "\n";
    for (std::size_t r = 0; r < cells.size(); ++r) {
        std::string line;
        for (std::size_t i = 0; i < cells[r].size() && i < width.size(); ++i) {
            if (i > 0) {
                line += "  ";
            }
            line += std::string(width[i] - cells[r][i].size(), ' ') + cells[r][i];
        }
        while (!line.empty() && line.back() == ' ') {
            line.pop_back();
        }
        out << line << "\n";
        if (r == 0) {
            std::size_t total = 0;
            for (auto w : width) {
                total += w + 2;
            }
            out << std::string(total - 2, '-') << "\n";
        }
    }
    for (const auto& n : t.notes) {
        out << "# " << n << "\n";
    }
    return out.str();
}

std::string render_csv(const Table& t)
{
    std::ostringstream out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        out << (i ? "," : "") << (t.columns[i].empty() ? "row" : t.columns[i]);
    }
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            const Cell& c = row[i];
            out << (i ? "," : "") << (c.is_text ? c.text : format_full(c.value));
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace gtseq
