#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "gtseq/design.hpp"
#include "gtseq/montecarlo.hpp"
#include "gtseq/sequential.hpp"
#include "gtseq/twostage.hpp"

namespace gtseq {

// nlohmann::json conversions, found by ADL. Non-finite doubles are written
// as null and read back as +infinity.
void to_json(nlohmann::json& j, const GroupPlan& x);
void from_json(const nlohmann::json& j, GroupPlan& x);
void to_json(nlohmann::json& j, const SequentialState& x);
void from_json(const nlohmann::json& j, SequentialState& x);
void to_json(nlohmann::json& j, const SequentialAnalysis& x);
void from_json(const nlohmann::json& j, SequentialAnalysis& x);
void to_json(nlohmann::json& j, const LinearComboMoments& x);
void from_json(const nlohmann::json& j, LinearComboMoments& x);
void to_json(nlohmann::json& j, const SimulationSummary& x);
void from_json(const nlohmann::json& j, SimulationSummary& x);

/// Shortest decimal that reads back to the same double.
std::string format_full(double x);

/// Fixed-point with the given number of decimals.
std::string format_fixed(double x, int decimals);

inline constexpr const char* kSimulationCsvHeader =
    "procedure,p,k,m,replicates,seed,E_N,sd_N,E_phat,sd_phat,CP,mc_se_CP";

std::string simulation_csv_row(const SimulationSpec& spec, const SimulationSummary& s);

}  // namespace gtseq
