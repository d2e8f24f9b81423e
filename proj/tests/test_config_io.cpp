#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "config.hpp"
#include "errors.hpp"
#include "serialize.hpp"

using namespace trisplit;

namespace {

const char *kFullConfig = R"(# reference config
[problem]
name = "convex_sanity"
m = 2
seed = 7

[tuning]
safety = 0.5

[stopping]
max_iterations = 400
step_tol = 1e-9
divergence_guard = 1e9

[run]
strict_mode = true
output_dir = "out"
formats = ["csv", "json"]
)";

} // namespace

TEST_CASE("config parsing") {
  SUBCASE("values, sections, comments") {
    const ConfigTable t = ConfigTable::parse(kFullConfig, "test.toml");
    CHECK(t.string_or("problem.name", "") == "convex_sanity");
    CHECK(t.number("problem.m") == 2.0);
    CHECK(t.number("stopping.step_tol") == 1e-9);
    CHECK(t.boolean_or("run.strict_mode", false));
    CHECK(t.has_section("tuning"));
    CHECK_FALSE(t.has_section("params"));
    const auto &formats = t.at("run.formats").as_array();
    REQUIRE(formats.size() == 2);
    CHECK(formats[0].as_string() == "csv");
  }

  SUBCASE("nested arrays hold matrix literals") {
    const ConfigTable t = ConfigTable::parse("[problem.a]\nentries = [[1, 0], [0.5, -2]]\n",
                                             "inline.toml");
    const auto &rows = t.at("problem.a.entries").as_array();
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].as_array()[1].as_number() == -2.0);
  }

  SUBCASE("errors carry the line number") {
    try {
      (void)ConfigTable::parse("[problem]\nname = \"x\"\nbad line\n", "broken.toml");
      FAIL("expected a config error");
    } catch (const ConfigError &e) {
      CHECK(std::string(e.what()).find("broken.toml:3") != std::string::npos);
    }
    CHECK_THROWS_AS((void)ConfigTable::parse("a = 1\na = 2\n", "dup.toml"), ConfigError);
    CHECK_THROWS_AS((void)ConfigTable::parse("a = 1 trailing\n", "t.toml"), ConfigError);
    CHECK_THROWS_AS((void)ConfigTable::parse("[unclosed\n", "s.toml"), ConfigError);
    CHECK_THROWS_AS((void)ConfigTable::parse("x = \"open\n", "q.toml"), ConfigError);
  }
}

TEST_CASE("malformed inputs fail with config errors, never anything else") {
  const char *cases[] = {
      "[",
      "]",
      "= 5",
      "x =",
      "x = [1, [2, 3]",
      "x = [,]",
      "x = [1 2]",
      "x = tru",
      "x = \"",
      "x = 1e",
      "[a]\nx = 1\n[a]\nx = 2",
      "\xff\xfe = 1",
      "x = 1]",
      "x = --5",
      "[a b]\n",
  };
  for (const char *text : cases) {
    CHECK_THROWS_AS((void)ConfigTable::parse(text, "fuzz.toml"), ConfigError);
  }

  // odd but legal inputs parse
  CHECK_NOTHROW((void)ConfigTable::parse("", "empty.toml"));
  CHECK_NOTHROW((void)ConfigTable::parse("# only a comment\n\n", "c.toml"));
  CHECK_NOTHROW((void)ConfigTable::parse("x = [[]]\n", "n.toml"));
  CHECK_NOTHROW((void)ConfigTable::parse("x = -1.5e-300\n", "t.toml"));
  CHECK_NOTHROW((void)ConfigTable::parse("x = \"# not a comment\"\n", "s.toml"));
}

TEST_CASE("run config validation") {
  SUBCASE("well-formed") {
    const RunConfig cfg = parse_run_config(ConfigTable::parse(kFullConfig, "test.toml"));
    CHECK(cfg.problem.name == "convex_sanity");
    CHECK(cfg.tuning_safety == 0.5);
    CHECK_FALSE(cfg.params.has_value());
    CHECK(cfg.stopping.max_iterations == 400);
    CHECK(cfg.strict_mode);
    CHECK(cfg.write_csv);
    CHECK(cfg.write_json);
  }

  SUBCASE("optional diagnostics inputs") {
    const std::string text = std::string(kFullConfig) +
                             "[diagnostics]\nloja_constant = 0.5\npsi_star = 2.8125\n";
    const RunConfig cfg = parse_run_config(ConfigTable::parse(text, "diag.toml"));
    CHECK(cfg.loja_constant == 0.5);
    CHECK(cfg.psi_star == 2.8125);
    const RunConfig plain = parse_run_config(ConfigTable::parse(kFullConfig, "t.toml"));
    CHECK_FALSE(plain.loja_constant.has_value());
    CHECK_FALSE(plain.psi_star.has_value());
  }

  SUBCASE("params and tuning are mutually exclusive") {
    const std::string both = std::string(kFullConfig) +
                             "[params]\nmu = 1\nbeta = 1\ntau = 1\nsigma = 0.5\n";
    CHECK_THROWS_AS((void)parse_run_config(ConfigTable::parse(both, "both.toml")),
                    ConfigError);
  }

  SUBCASE("one of params or tuning is required") {
    const char *neither = "[problem]\nname = \"convex_sanity\"\nm = 1\n";
    CHECK_THROWS_AS((void)parse_run_config(ConfigTable::parse(neither, "none.toml")),
                    ConfigError);
  }

  SUBCASE("unknown format is rejected") {
    const std::string bad = std::string("[problem]\nname = \"convex_sanity\"\n[tuning]\n"
                                        "safety = 0.5\n[run]\nformats = [\"xml\"]\n");
    CHECK_THROWS_AS((void)parse_run_config(ConfigTable::parse(bad, "fmt.toml")), ConfigError);
  }
}

TEST_CASE("custom problem descriptors round-trip through config text") {
  const char *text = R"(
[problem]
name = "custom"
inf_h = 0
[problem.f]
kind = "l1"
weight = 0.25
[problem.g]
kind = "squared_l2"
weight = 1.0
[problem.a]
entries = [[1, 0], [0, 1], [0.5, 0.5]]
[problem.h]
kind = "separable"
wx = 1.0
wy = 2.0
c = [0.5, -0.5]
d = [1.0]
)";
  const ConfigTable t = ConfigTable::parse(text, "custom.toml");
  const ProblemDescriptor d = parse_problem(t);
  const ProblemInstance pb = instantiate(d);
  CHECK(pb.m() == 2);
  CHECK(pb.p() == 3);
  CHECK(pb.q() == 1);
  CHECK(pb.f.kind() == ProxFunction::Kind::L1);
  CHECK(pb.h.lipschitz() == 2.0);
  CHECK(pb.inf_h == 0.0);
  CHECK(pb.flags.f_coercive);
  CHECK(pb.flags.g_coercive);

  // serialize, reparse, instantiate again: identical structure
  const std::string round = descriptor_to_config(d);
  const ProblemDescriptor d2 = parse_problem(ConfigTable::parse(round, "round.toml"));
  const ProblemInstance pb2 = instantiate(d2);
  CHECK(pb2.m() == pb.m());
  CHECK(pb2.p() == pb.p());
  CHECK(pb2.a.entries() == pb.a.entries());
  CHECK(pb2.h.lipschitz() == pb.h.lipschitz());
}

TEST_CASE("matrices load from csv paths relative to the config") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "trisplit_cfg_csv";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "a.csv");
    out << "1,0\n0,1\n0.5,0.5\n";
  }
  {
    std::ofstream out(dir / "p.toml");
    out << R"(
[problem]
name = "custom"
[problem.f]
kind = "l1"
[problem.g]
kind = "zero"
[problem.a]
csv = "a.csv"
[problem.h]
kind = "separable"
wx = 1.0
wy = 0.0
c = [0, 0]
d = [0]
)";
  }
  const ProblemInstance pb =
      instantiate(parse_problem(ConfigTable::parse_file((dir / "p.toml").string())));
  CHECK(pb.p() == 3);
  CHECK(pb.m() == 2);
  CHECK(pb.a.entry(2, 0) == 0.5);
  fs::remove_all(dir);
}

TEST_CASE("builtin descriptor dispatch") {
  ProblemDescriptor d;
  d.name = "reduction_proxgrad";
  d.q = 3;
  CHECK(instantiate(d).name == "reduction_proxgrad");
  d.name = "nonsense";
  CHECK_THROWS_AS((void)instantiate(d), ConfigError);
}

TEST_CASE("float formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 3.141592653589793, 1e-308, -2.5e17, 0.0}) {
    const std::string s = format_g17(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

namespace {

std::vector<IterationRecord> sample_records() {
  std::vector<IterationRecord> records(3);
  for (std::size_t i = 0; i < records.size(); ++i) {
    IterationRecord &r = records[i];
    r.n = i + 1;
    r.psi = 1.0 / (static_cast<double>(i) + 3.0);
    r.lagrangian = r.psi - 1e-3;
    r.objective = r.psi - 2e-3;
    r.feasibility = 1e-4 * static_cast<double>(i);
    r.dx = 0.1 / (static_cast<double>(i) + 1.0);
    r.dy = 0.2;
    r.dz = 0.3;
    r.du = 0.4;
    r.subgrad_norm = 0.5;
    r.kkt_grad_x = 0.6;
    r.kkt_y = 0.7;
    r.kkt_z = 0.8;
    r.kkt_feas = 0.9;
  }
  return records;
}

} // namespace

TEST_CASE("trace csv round-trip and determinism") {
  const std::vector<IterationRecord> records = sample_records();
  const std::string csv = trace_to_csv(records);
  CHECK(csv == trace_to_csv(records)); // byte identical

  const std::vector<IterationRecord> back = trace_from_csv(csv);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(back[i].n == records[i].n);
    CHECK(back[i].psi == records[i].psi); // exact via 17 digits
    CHECK(back[i].subgrad_norm == records[i].subgrad_norm);
    CHECK(back[i].kkt_feas == records[i].kkt_feas);
  }

  CHECK_THROWS_AS((void)trace_from_csv("wrong,header\n1,2\n"), IoError);
  CHECK_THROWS_AS((void)trace_from_csv(""), IoError);
}

TEST_CASE("trace json round-trip") {
  IterationTrace trace;
  trace.records = sample_records();
  trace.outcome = RunOutcome::Converged;
  trace.initial_lagrangian = 2.5;
  trace.params = {.mu = 1.5, .beta = 2.5, .tau = 3.5, .sigma = 0.5};
  trace.final_state.x = {1.0, 2.0};
  trace.final_state.y = {3.0};
  trace.final_state.z = {4.0, 5.0};
  trace.final_state.u = {6.0, 7.0};
  trace.final_state.iteration = 3;

  const nlohmann::json j = trace_to_json(trace);
  CHECK(j.at("outcome") == "converged");
  CHECK(j.at("initial_lagrangian") == 2.5);

  const std::vector<IterationRecord> back = records_from_trace_json(j);
  REQUIRE(back.size() == trace.records.size());
  for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i].psi == trace.records[i].psi);

  const SolverParams p = params_from_json(j.at("params"));
  CHECK(p.beta == 2.5);

  // through text and back, still exact
  const nlohmann::json reparsed = nlohmann::json::parse(j.dump());
  CHECK(records_from_trace_json(reparsed)[2].psi == trace.records[2].psi);
}

TEST_CASE("constants json round-trip") {
  SpectralQuantities spec;
  spec.operator_norm = 1.0;
  spec.min_eig_aat = 1.0;
  spec.kappa = 1.0;
  spec.surjective = true;
  const SolverParams p = select_parameters(spec, 1.0, 0.5);
  DerivedConstants c = derive_constants(spec, 1.0, p);
  c.psi_lower_bound_hint = 0.0;
  c = c.with_lojasiewicz(2.0);

  const DerivedConstants back = constants_from_json(constants_to_json(c));
  CHECK(back.c2 == c.c2);
  CHECK(back.c5 == c.c5);
  CHECK(back.c11 == c.c11);
  CHECK(back.gamma1_exists == c.gamma1_exists);
  CHECK(back.c10 == c.c10);
  CHECK(back.psi_lower_bound_hint == c.psi_lower_bound_hint);
}
