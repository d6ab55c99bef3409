#include "gtseq/io.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace gtseq {

namespace {

nlohmann::json number(double x)
{
    if (!std::isfinite(x)) {
        return nullptr;
    }
    return x;
}

double read_number(const nlohmann::json& j, const char* key)
{
    const auto& v = j.at(key);
    if (v.is_null()) {
        return std::numeric_limits<double>::infinity();
    }
    return v.get<double>();
}

}  // namespace

void to_json(nlohmann::json& j, const GroupPlan& x)
{
    j = {{"k", x.k}, {"n_required", number(x.n_required)}, {"n_ceil", x.n_ceil}};
}

void from_json(const nlohmann::json& j, GroupPlan& x)
{
    x.k = j.at("k").get<int>();
    x.n_required = read_number(j, "n_required");
    x.n_ceil = j.at("n_ceil").get<long long>();
}

void to_json(nlohmann::json& j, const SequentialState& x)
{
    j = {{"n", x.n},
         {"s", x.s},
         {"xbar", x.xbar()},
         {"p_hat", x.p_hat},
         {"threshold", number(x.threshold)},
         {"stopped", x.stopped},
         {"truncated", x.truncated}};
}

void from_json(const nlohmann::json& j, SequentialState& x)
{
    x.n = j.at("n").get<long long>();
    x.s = j.at("s").get<long long>();
    x.p_hat = j.at("p_hat").get<double>();
    x.threshold = read_number(j, "threshold");
    x.stopped = j.at("stopped").get<bool>();
    x.truncated = j.value("truncated", false);
}

void to_json(nlohmann::json& j, const SequentialAnalysis& x)
{
    j = {{"E_N", x.n.mean},
         {"sd_N", x.n.sd},
         {"E_invN", x.n.mean_inverse},
         {"var_invN", x.n.var_inverse},
         {"E_phat", x.estimate.mean},
         {"sd_phat", x.estimate.sd},
         {"CP", x.cp}};
}

void from_json(const nlohmann::json& j, SequentialAnalysis& x)
{
    x.n.mean = j.at("E_N").get<double>();
    x.n.sd = j.at("sd_N").get<double>();
    x.n.mean_inverse = j.at("E_invN").get<double>();
    x.n.var_inverse = j.at("var_invN").get<double>();
    x.estimate.mean = j.at("E_phat").get<double>();
    x.estimate.sd = j.at("sd_phat").get<double>();
    x.cp = j.at("CP").get<double>();
}

void to_json(nlohmann::json& j, const LinearComboMoments& x)
{
    j = {{"mean", x.mean},
         {"var", x.var},
         {"se", x.se},
         {"expected_conditional_var", x.expected_conditional_var},
         {"var_conditional_mean", x.var_conditional_mean}};
}

void from_json(const nlohmann::json& j, LinearComboMoments& x)
{
    x.mean = j.at("mean").get<double>();
    x.var = j.at("var").get<double>();
    x.se = j.at("se").get<double>();
    x.expected_conditional_var = j.at("expected_conditional_var").get<double>();
    x.var_conditional_mean = j.at("var_conditional_mean").get<double>();
}

void to_json(nlohmann::json& j, const SimulationSummary& x)
{
    j = {{"E_N", x.E_N},
         {"sd_N", x.sd_N},
         {"E_phat", x.E_phat},
         {"sd_phat", x.sd_phat},
         {"CP", x.CP},
         {"mc_se",
          {{"E_N", x.mc_se_E_N},
           {"sd_N", x.mc_se_sd_N},
           {"E_phat", x.mc_se_E_phat},
           {"sd_phat", x.mc_se_sd_phat},
           {"CP", x.mc_se_CP}}},
         {"replicates", x.replicates},
         {"flagged", x.flagged}};
}

void from_json(const nlohmann::json& j, SimulationSummary& x)
{
    x.E_N = j.at("E_N").get<double>();
    x.sd_N = j.at("sd_N").get<double>();
    x.E_phat = j.at("E_phat").get<double>();
    x.sd_phat = j.at("sd_phat").get<double>();
    x.CP = j.at("CP").get<double>();
    const auto& se = j.at("mc_se");
    x.mc_se_E_N = se.at("E_N").get<double>();
    x.mc_se_sd_N = se.at("sd_N").get<double>();
    x.mc_se_E_phat = se.at("E_phat").get<double>();
    x.mc_se_sd_phat = se.at("sd_phat").get<double>();
    x.mc_se_CP = se.at("CP").get<double>();
    x.replicates = j.at("replicates").get<long long>();
    x.flagged = j.at("flagged").get<long long>();
}

std::string format_full(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string format_fixed(double x, int decimals)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, decimals);
    return std::string(buf, res.ptr);
}

std::string simulation_csv_row(const SimulationSpec& spec, const SimulationSummary& s)
{
    std::ostringstream row;
    row << to_string(spec.procedure) << ',' << format_full(spec.p) << ',' << spec.k << ','
        << spec.m << ',' << spec.replicates << ',' << spec.seed << ',' << format_full(s.E_N)
        << ',' << format_full(s.sd_N) << ',' << format_full(s.E_phat) << ','
        << format_full(s.sd_phat) << ',' << format_full(s.CP) << ',' << format_full(s.mc_se_CP);
    return row.str();
}

}  // namespace gtseq
