#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "diagnostics.hpp"
#include "solver.hpp"

namespace trisplit {

/// Shortest 17-significant-digit representation; round-trips exactly.
std::string format_g17(double v);

std::string read_text_file(const std::string &path);
void write_text_file(const std::string &path, const std::string &content);

/// CSV with the fixed header
/// n,psi,lagrangian,objective,feasibility,dx,dy,dz,du,subgrad_norm,kkt_gx,kkt_y,kkt_z,kkt_feas
std::string trace_to_csv(const std::vector<IterationRecord> &records);
std::vector<IterationRecord> trace_from_csv(const std::string &text);

nlohmann::json record_to_json(const IterationRecord &record);
IterationRecord record_from_json(const nlohmann::json &j);

/// Full trace document: metadata, records and the final state snapshot.
nlohmann::json trace_to_json(const IterationTrace &trace);
std::vector<IterationRecord> records_from_trace_json(const nlohmann::json &j);

nlohmann::json params_to_json(const SolverParams &params);
SolverParams params_from_json(const nlohmann::json &j);

nlohmann::json constants_to_json(const DerivedConstants &constants);
DerivedConstants constants_from_json(const nlohmann::json &j);

nlohmann::json admissibility_to_json(const AdmissibilityReport &report);

nlohmann::json diagnostics_to_json(const DiagnosticsReport &report);

const char *outcome_name(RunOutcome outcome);

} // namespace trisplit
