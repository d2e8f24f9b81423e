// Command-line front end for the trisplit shared library. Talks to the solver
// exclusively through the C API in trisplit.h.

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "trisplit.h"

namespace {

int exit_code_of(ts_status status) {
  switch (status) {
  case TS_OK:
  case TS_ERR_CONFIG:
  case TS_MAX_ITERATIONS:
  case TS_ASSUMPTION_VIOLATION:
  case TS_DIVERGENCE:
    return static_cast<int>(status);
  default:
    return 1;
  }
}

void report_failure(const std::string &what, ts_status status) {
  if (status != TS_OK && status != TS_MAX_ITERATIONS)
    std::fprintf(stderr, "%s: %s\n", what.c_str(), ts_last_error());
}

struct RunArgs {
  std::vector<std::string> configs;
  std::string out_dir;
  bool strict = false;
  bool permissive = false;
  unsigned jobs = 1;
  std::uint64_t seed = 0;
  bool has_seed = false;
};

int run_one(const std::string &config, const RunArgs &args, const std::string &out_dir) {
  ts_run_options options{};
  options.output_dir = out_dir.empty() ? nullptr : out_dir.c_str();
  options.strict_override = args.strict ? 1 : (args.permissive ? 0 : -1);
  options.has_seed_override = args.has_seed ? 1 : 0;
  options.seed_override = args.seed;
  const ts_status status = ts_command_run(config.c_str(), &options);
  report_failure(config, status);
  return exit_code_of(status);
}

int do_run(const RunArgs &args) {
  // With several configs, each gets a subdirectory of the shared output
  // directory named after its stem, so the fixed file names cannot collide.
  std::vector<std::string> out_dirs(args.configs.size(), args.out_dir);
  if (args.configs.size() > 1 && !args.out_dir.empty()) {
    for (std::size_t i = 0; i < args.configs.size(); ++i) {
      const std::string stem = std::filesystem::path(args.configs[i]).stem().string();
      out_dirs[i] = (std::filesystem::path(args.out_dir) / stem).string();
    }
  }

  if (args.jobs <= 1 || args.configs.size() == 1) {
    int worst = 0;
    for (std::size_t i = 0; i < args.configs.size(); ++i)
      worst = std::max(worst, run_one(args.configs[i], args, out_dirs[i]));
    return worst;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<int> worst{0};
  std::vector<std::thread> workers;
  const unsigned n_workers = std::min<unsigned>(args.jobs, args.configs.size());
  for (unsigned w = 0; w < n_workers; ++w) {
    workers.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= args.configs.size()) break;
        const int code = run_one(args.configs[i], args, out_dirs[i]);
        int cur = worst.load();
        while (code > cur && !worst.compare_exchange_weak(cur, code)) {
        }
      }
    });
  }
  for (std::thread &t : workers) t.join();
  return worst.load();
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"full-splitting proximal solver for min F(Ax) + G(y) + H(x,y)"};
  app.set_version_flag("--version", std::string(ts_version()));
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App *run = app.add_subcommand("run", "solve a problem described by a config file");
  run->add_option("--config", run_args.configs, "config file (repeatable)")->required();
  run->add_option("--out", run_args.out_dir, "output directory (overrides the config)");
  run->add_flag("--strict", run_args.strict, "refuse inadmissible parameters");
  run->add_flag("--permissive", run_args.permissive, "run outside the admissible region");
  run->add_option("--jobs", run_args.jobs, "worker threads for multiple configs")
      ->check(CLI::PositiveNumber);
  CLI::Option *seed_opt =
      run->add_option("--seed", run_args.seed, "override the instance seed");

  std::string tune_config;
  CLI::App *tune = app.add_subcommand("tune", "derive parameters and constants");
  tune->add_option("--config", tune_config, "config file")->required();

  std::string trace_path, constants_path;
  CLI::App *verify = app.add_subcommand("verify", "re-check a stored trace");
  verify->add_option("trace", trace_path, "trace.csv or trace.json")->required();
  verify->add_option("constants", constants_path, "constants.json")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    if (run_args.strict && run_args.permissive) {
      std::fprintf(stderr, "--strict and --permissive are mutually exclusive\n");
      return 1;
    }
    run_args.has_seed = seed_opt->count() > 0;
    return do_run(run_args);
  }

  if (tune->parsed()) {
    char *json = nullptr;
    const ts_status status = ts_command_tune(tune_config.c_str(), &json);
    if (json) {
      std::fputs(json, stdout);
      ts_string_free(json);
    }
    report_failure(tune_config, status);
    return exit_code_of(status);
  }

  char *report = nullptr;
  const ts_status status = ts_command_verify(trace_path.c_str(), constants_path.c_str(),
                                             &report);
  if (report) {
    std::fputs(report, stdout);
    ts_string_free(report);
  }
  report_failure(trace_path, status);
  return exit_code_of(status);
}
