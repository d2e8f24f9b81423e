#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bench.hpp"
#include "solver.hpp"

namespace trisplit {

/// Parsed config value: scalar, string, boolean or (possibly nested) array.
struct ConfigValue {
  using Array = std::vector<ConfigValue>;
  std::variant<double, bool, std::string, Array> data;

  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }

  double as_number() const;
  bool as_bool() const;
  const std::string &as_string() const;
  const Array &as_array() const;
};

/// Flat table of dotted keys ("problem.f.kind") to values, as written in the
/// config text. Section headers [a.b] prefix the keys that follow.
class ConfigTable {
public:
  static ConfigTable parse(const std::string &text, const std::string &source_name);
  static ConfigTable parse_file(const std::string &path);

  bool has(const std::string &key) const { return values_.count(key) > 0; }
  const ConfigValue *find(const std::string &key) const;
  const ConfigValue &at(const std::string &key) const;

  double number(const std::string &key) const;
  double number_or(const std::string &key, double fallback) const;
  bool boolean_or(const std::string &key, bool fallback) const;
  std::string string_or(const std::string &key, const std::string &fallback) const;

  /// True when any key equals `prefix` or starts with `prefix.`.
  bool has_section(const std::string &prefix) const;

  const std::map<std::string, ConfigValue> &values() const { return values_; }
  const std::string &source() const { return source_; }
  /// Directory of the parsed file; used to resolve relative csv paths.
  const std::string &base_dir() const { return base_dir_; }
  void set_base_dir(std::string dir) { base_dir_ = std::move(dir); }

private:
  std::map<std::string, ConfigValue> values_;
  std::string source_;
  std::string base_dir_;
};

/// What the [problem] table describes; instantiate() turns it into oracles.
struct ProblemDescriptor {
  std::string name; // builtin name or "custom"
  std::size_t m = 0, q = 0, p = 0;
  std::uint64_t seed = 0;
  // custom parts (set when name == "custom")
  std::optional<ConfigValue> custom; // retained raw [problem] subtree keys
  std::map<std::string, ConfigValue> custom_keys;
  std::string base_dir;
};

ProblemDescriptor parse_problem(const ConfigTable &table);
ProblemInstance instantiate(const ProblemDescriptor &descriptor);

/// Round-trip serialization of a descriptor back to config text.
std::string descriptor_to_config(const ProblemDescriptor &descriptor);

struct RunConfig {
  ProblemDescriptor problem;
  std::optional<SolverParams> params;
  std::optional<double> tuning_safety;
  StoppingRule stopping;
  bool strict_mode = true;
  std::string output_dir;
  bool write_csv = true;
  bool write_json = true;
  std::optional<double> loja_constant; // user-declared Lojasiewicz constant
  std::optional<double> psi_star;      // overrides the tail-mean limit estimate
};

/// Parses and validates a full run config. Exactly one of [params] and
/// [tuning] must be present.
RunConfig parse_run_config(const ConfigTable &table);
RunConfig parse_run_config_file(const std::string &path);

} // namespace trisplit
