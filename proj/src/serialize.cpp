#include "serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "errors.hpp"

namespace trisplit {

using nlohmann::json;

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

namespace {
constexpr const char *kCsvHeader =
    "n,psi,lagrangian,objective,feasibility,dx,dy,dz,du,subgrad_norm,"
    "kkt_gx,kkt_y,kkt_z,kkt_feas";

json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr; // JSON has no inf/nan; readers treat null as "not available"
}

double json_number(const json &j, const char *key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::numeric_limits<double>::quiet_NaN();
  return it->get<double>();
}
} // namespace

std::string trace_to_csv(const std::vector<IterationRecord> &records) {
  std::string out(kCsvHeader);
  out.push_back('\n');
  for (const IterationRecord &r : records) {
    out += std::to_string(r.n);
    const double cols[] = {r.psi, r.lagrangian, r.objective,   r.feasibility, r.dx,
                           r.dy,  r.dz,         r.du,          r.subgrad_norm, r.kkt_grad_x,
                           r.kkt_y, r.kkt_z,    r.kkt_feas};
    for (double c : cols) {
      out.push_back(',');
      out += format_g17(c);
    }
    out.push_back('\n');
  }
  return out;
}

std::vector<IterationRecord> trace_from_csv(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError("trace csv: empty file");
  // tolerate a trailing \r from foreign editors
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw IoError("trace csv: unexpected header");

  std::vector<IterationRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const char *start = cell.c_str();
      char *end = nullptr;
      const double v = std::strtod(start, &end);
      if (end == start)
        throw IoError("trace csv: bad number '" + cell + "' on line " +
                      std::to_string(line_no));
      cells.push_back(v);
    }
    if (cells.size() != 14)
      throw IoError("trace csv: expected 14 columns on line " + std::to_string(line_no));
    IterationRecord r;
    r.n = static_cast<std::uint64_t>(cells[0]);
    r.psi = cells[1];
    r.lagrangian = cells[2];
    r.objective = cells[3];
    r.feasibility = cells[4];
    r.dx = cells[5];
    r.dy = cells[6];
    r.dz = cells[7];
    r.du = cells[8];
    r.subgrad_norm = cells[9];
    r.kkt_grad_x = cells[10];
    r.kkt_y = cells[11];
    r.kkt_z = cells[12];
    r.kkt_feas = cells[13];
    records.push_back(r);
  }
  return records;
}

json record_to_json(const IterationRecord &r) {
  return json{{"n", r.n},
              {"psi", finite_or_null(r.psi)},
              {"lagrangian", finite_or_null(r.lagrangian)},
              {"objective", finite_or_null(r.objective)},
              {"feasibility", r.feasibility},
              {"dx", r.dx},
              {"dy", r.dy},
              {"dz", r.dz},
              {"du", r.du},
              {"subgrad_norm", r.subgrad_norm},
              {"kkt_gx", r.kkt_grad_x},
              {"kkt_y", r.kkt_y},
              {"kkt_z", r.kkt_z},
              {"kkt_feas", r.kkt_feas}};
}

IterationRecord record_from_json(const json &j) {
  IterationRecord r;
  r.n = j.at("n").get<std::uint64_t>();
  r.psi = json_number(j, "psi");
  r.lagrangian = json_number(j, "lagrangian");
  r.objective = json_number(j, "objective");
  r.feasibility = j.at("feasibility").get<double>();
  r.dx = j.at("dx").get<double>();
  r.dy = j.at("dy").get<double>();
  r.dz = j.at("dz").get<double>();
  r.du = j.at("du").get<double>();
  r.subgrad_norm = j.at("subgrad_norm").get<double>();
  r.kkt_grad_x = j.at("kkt_gx").get<double>();
  r.kkt_y = j.at("kkt_y").get<double>();
  r.kkt_z = j.at("kkt_z").get<double>();
  r.kkt_feas = j.at("kkt_feas").get<double>();
  return r;
}

const char *outcome_name(RunOutcome outcome) {
  switch (outcome) {
  case RunOutcome::Converged: return "converged";
  case RunOutcome::MaxIterations: return "max_iterations";
  case RunOutcome::AssumptionViolation: return "assumption_violation";
  case RunOutcome::Divergence: return "divergence";
  }
  return "?";
}

json trace_to_json(const IterationTrace &trace) {
  json records = json::array();
  for (const IterationRecord &r : trace.records) records.push_back(record_to_json(r));

  const SolverState &fin = trace.final_state;
  json j{{"outcome", outcome_name(trace.outcome)},
         {"message", trace.message},
         {"initial_lagrangian", finite_or_null(trace.initial_lagrangian)},
         {"params", params_to_json(trace.params)},
         {"records", std::move(records)},
         {"final_state",
          json{{"x", fin.x}, {"y", fin.y}, {"z", fin.z}, {"u", fin.u},
               {"iteration", fin.iteration}}}};
  return j;
}

std::vector<IterationRecord> records_from_trace_json(const json &j) {
  std::vector<IterationRecord> records;
  for (const json &r : j.at("records")) records.push_back(record_from_json(r));
  return records;
}

json params_to_json(const SolverParams &p) {
  return json{{"mu", p.mu}, {"beta", p.beta}, {"tau", p.tau}, {"sigma", p.sigma}};
}

SolverParams params_from_json(const json &j) {
  SolverParams p;
  p.mu = j.at("mu").get<double>();
  p.beta = j.at("beta").get<double>();
  p.tau = j.at("tau").get<double>();
  p.sigma = j.at("sigma").get<double>();
  return p;
}

json constants_to_json(const DerivedConstants &c) {
  json j{{"ell_plus", c.ell_plus},
         {"nu", c.nu},
         {"delta_tau_prime", c.delta_tau_prime},
         {"c0", c.c0},
         {"c1", c.c1},
         {"c2", c.c2},
         {"c3", c.c3},
         {"c4", c.c4},
         {"c5", c.c5},
         {"c6", c.c6},
         {"c7", c.c7},
         {"c8", finite_or_null(c.c8)},
         {"c9", c.c9},
         {"c11", finite_or_null(c.c11)},
         {"c12", finite_or_null(c.c12)},
         {"gamma1_exists", c.gamma1_exists},
         {"gamma2_exists", c.gamma2_exists}};
  j["loja_constant"] = c.loja_constant ? json(*c.loja_constant) : json(nullptr);
  j["c10"] = c.c10 ? json(*c.c10) : json(nullptr);
  j["psi_lower_bound_hint"] =
      c.psi_lower_bound_hint ? json(*c.psi_lower_bound_hint) : json(nullptr);
  return j;
}

DerivedConstants constants_from_json(const json &j) {
  DerivedConstants c;
  c.ell_plus = j.at("ell_plus").get<double>();
  c.nu = j.at("nu").get<double>();
  c.delta_tau_prime = j.at("delta_tau_prime").get<double>();
  c.c0 = j.at("c0").get<double>();
  c.c1 = j.at("c1").get<double>();
  c.c2 = j.at("c2").get<double>();
  c.c3 = j.at("c3").get<double>();
  c.c4 = j.at("c4").get<double>();
  c.c5 = j.at("c5").get<double>();
  c.c6 = j.at("c6").get<double>();
  c.c7 = j.at("c7").get<double>();
  c.c8 = json_number(j, "c8");
  c.c9 = j.at("c9").get<double>();
  c.c11 = json_number(j, "c11");
  c.c12 = json_number(j, "c12");
  c.gamma1_exists = j.at("gamma1_exists").get<bool>();
  c.gamma2_exists = j.at("gamma2_exists").get<bool>();
  if (j.contains("loja_constant") && !j.at("loja_constant").is_null())
    c.loja_constant = j.at("loja_constant").get<double>();
  if (j.contains("c10") && !j.at("c10").is_null()) c.c10 = j.at("c10").get<double>();
  if (j.contains("psi_lower_bound_hint") && !j.at("psi_lower_bound_hint").is_null())
    c.psi_lower_bound_hint = j.at("psi_lower_bound_hint").get<double>();
  return c;
}

json admissibility_to_json(const AdmissibilityReport &r) {
  return json{{"sigma_in_range", r.sigma_in_range},
              {"dual_step_compatible", r.dual_step_compatible},
              {"c2_positive", r.c2_positive},
              {"c3_positive", r.c3_positive},
              {"c4_positive", r.c4_positive},
              {"gamma1_exists", r.gamma1_exists},
              {"gamma2_exists", r.gamma2_exists},
              {"admissible", r.admissible()},
              {"sufficient_region",
               json{{"sigma", r.sufficient_sigma},
                    {"beta", r.sufficient_beta},
                    {"delta_positive", r.sufficient_delta_positive},
                    {"tau", r.sufficient_tau},
                    {"mu", r.sufficient_mu},
                    {"holds", r.sufficient_region()}}}};
}

namespace {
const char *regime_name(RateRegime regime) {
  switch (regime) {
  case RateRegime::FiniteTime: return "finite_time";
  case RateRegime::Linear: return "linear";
  case RateRegime::Sublinear: return "sublinear";
  case RateRegime::Undetermined: return "undetermined";
  }
  return "?";
}
} // namespace

json diagnostics_to_json(const DiagnosticsReport &r) {
  json j{{"descent_ok", r.descent.ok},
         {"descent_worst_violation", finite_or_null(r.descent.worst_violation)},
         {"subgrad_bound_ok", r.subgrad.ok},
         {"subgrad_worst_slack", finite_or_null(r.subgrad.worst_slack)},
         {"outcome", outcome_name(r.outcome)},
         {"bounded", r.bounded},
         {"max_step_norm", finite_or_null(r.max_step_norm)},
         {"psi_star_used", finite_or_null(r.psi_star_used)},
         {"estimated_loja_constant", r.estimated_loja_constant},
         {"rate",
          json{{"regime", regime_name(r.rate.regime)},
               {"theta_hat", r.rate.theta_hat ? json(*r.rate.theta_hat) : json(nullptr)},
               {"q_hat", r.rate.q_hat ? json(*r.rate.q_hat) : json(nullptr)},
               {"fit_quality", r.rate.fit_quality},
               {"window", json::array({r.rate.window_begin, r.rate.window_end})}}},
         {"final_kkt",
          json{{"grad_x", r.final_kkt.grad_x},
               {"y", r.final_kkt.y},
               {"z", r.final_kkt.z},
               {"feasibility", r.final_kkt.feasibility}}}};
  j["psi_lower_ok"] = r.psi_lower_ok ? json(*r.psi_lower_ok) : json(nullptr);
  j["recurrence_ok"] = r.recurrence_ok ? json(*r.recurrence_ok) : json(nullptr);
  j["recurrence_empirical_c10"] =
      r.recurrence_empirical_c10 ? json(*r.recurrence_empirical_c10) : json(nullptr);
  j["recurrence_reference_c10"] =
      r.recurrence_reference_c10 ? json(*r.recurrence_reference_c10) : json(nullptr);
  if (r.iterate_rate) {
    j["iterate_rate"] = json{{"ok", r.iterate_rate->ok},
                             {"worst_slack_xyu", finite_or_null(r.iterate_rate->worst_slack_xyu)},
                             {"worst_slack_z", finite_or_null(r.iterate_rate->worst_slack_z)},
                             {"theta_used", r.iterate_rate->theta_used},
                             {"c_l_used", r.iterate_rate->c_l_used}};
  } else {
    j["iterate_rate"] = nullptr;
  }
  if (r.limit_point) {
    j["limit_point"] = json{{"x", r.limit_point->x},
                            {"y", r.limit_point->y},
                            {"z", r.limit_point->z},
                            {"u", r.limit_point->u},
                            {"iteration", r.limit_point->iteration}};
  } else {
    j["limit_point"] = nullptr;
  }
  return j;
}

} // namespace trisplit
