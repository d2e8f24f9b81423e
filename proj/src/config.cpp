#include "config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace trisplit {

double ConfigValue::as_number() const {
  if (const double *v = std::get_if<double>(&data)) return *v;
  throw ConfigError("expected a number");
}

bool ConfigValue::as_bool() const {
  if (const bool *v = std::get_if<bool>(&data)) return *v;
  throw ConfigError("expected true or false");
}

const std::string &ConfigValue::as_string() const {
  if (const std::string *v = std::get_if<std::string>(&data)) return *v;
  throw ConfigError("expected a quoted string");
}

const ConfigValue::Array &ConfigValue::as_array() const {
  if (const Array *v = std::get_if<Array>(&data)) return *v;
  throw ConfigError("expected an array");
}

namespace {

struct Scanner {
  const std::string &text;
  std::size_t pos = 0;
  const std::string &file;
  int line;

  [[noreturn]] void fail(const std::string &msg) const { throw ConfigError(file, line, msg); }

  void skip_space() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }

  bool done() {
    skip_space();
    return pos >= text.size() || text[pos] == '#';
  }

  char peek() {
    skip_space();
    if (pos >= text.size()) fail("unexpected end of line");
    return text[pos];
  }

  ConfigValue parse_value() {
    const char c = peek();
    if (c == '[') return parse_array();
    if (c == '"') return parse_string();
    if (text.compare(pos, 4, "true") == 0 && boundary(pos + 4)) {
      pos += 4;
      return ConfigValue{true};
    }
    if (text.compare(pos, 5, "false") == 0 && boundary(pos + 5)) {
      pos += 5;
      return ConfigValue{false};
    }
    return parse_number();
  }

  bool boundary(std::size_t at) const {
    return at >= text.size() || !(std::isalnum(static_cast<unsigned char>(text[at])) ||
                                  text[at] == '_');
  }

  ConfigValue parse_array() {
    ++pos; // '['
    ConfigValue::Array items;
    skip_space();
    if (pos < text.size() && text[pos] == ']') {
      ++pos;
      return ConfigValue{std::move(items)};
    }
    while (true) {
      items.push_back(parse_value());
      const char c = peek();
      if (c == ',') {
        ++pos;
        continue;
      }
      if (c == ']') {
        ++pos;
        break;
      }
      fail("expected ',' or ']' in array");
    }
    return ConfigValue{std::move(items)};
  }

  ConfigValue parse_string() {
    ++pos; // '"'
    std::string s;
    while (pos < text.size() && text[pos] != '"') {
      if (text[pos] == '\\' && pos + 1 < text.size()) ++pos;
      s.push_back(text[pos++]);
    }
    if (pos >= text.size()) fail("unterminated string");
    ++pos;
    return ConfigValue{std::move(s)};
  }

  ConfigValue parse_number() {
    skip_space();
    const char *start = text.c_str() + pos;
    char *end = nullptr;
    const double v = std::strtod(start, &end);
    if (end == start) fail("expected a value");
    pos += static_cast<std::size_t>(end - start);
    return ConfigValue{v};
  }
};

bool valid_key(const std::string &k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) return false;
  return true;
}

std::string trim(const std::string &s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

} // namespace

ConfigTable ConfigTable::parse(const std::string &text, const std::string &source_name) {
  ConfigTable table;
  table.source_ = source_name;

  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    // strip comments outside strings
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_string = !in_string;
      if (line[i] == '#' && !in_string) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(source_name, line_no, "section header must end with ']'");
      section = trim(line.substr(1, line.size() - 2));
      if (!valid_key(section))
        throw ConfigError(source_name, line_no, "invalid section name '" + section + "'");
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source_name, line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (!valid_key(key))
      throw ConfigError(source_name, line_no, "invalid key '" + key + "'");

    const std::string value_text = line.substr(eq + 1);
    Scanner scan{value_text, 0, source_name, line_no};
    ConfigValue value = scan.parse_value();
    if (!scan.done())
      throw ConfigError(source_name, line_no, "trailing characters after value");

    const std::string full = section.empty() ? key : section + "." + key;
    if (table.values_.count(full))
      throw ConfigError(source_name, line_no, "duplicate key '" + full + "'");
    table.values_.emplace(full, std::move(value));
  }
  return table;
}

ConfigTable ConfigTable::parse_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  ConfigTable t = parse(buf.str(), path);
  t.set_base_dir(std::filesystem::path(path).parent_path().string());
  return t;
}

const ConfigValue *ConfigTable::find(const std::string &key) const {
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

const ConfigValue &ConfigTable::at(const std::string &key) const {
  if (const ConfigValue *v = find(key)) return *v;
  throw ConfigError(source_ + ": missing required key '" + key + "'");
}

double ConfigTable::number(const std::string &key) const {
  const ConfigValue &v = at(key);
  if (!v.is_number())
    throw ConfigError(source_ + ": key '" + key + "' must be a number");
  return v.as_number();
}

double ConfigTable::number_or(const std::string &key, double fallback) const {
  const ConfigValue *v = find(key);
  if (!v) return fallback;
  if (!v->is_number())
    throw ConfigError(source_ + ": key '" + key + "' must be a number");
  return v->as_number();
}

bool ConfigTable::boolean_or(const std::string &key, bool fallback) const {
  const ConfigValue *v = find(key);
  if (!v) return fallback;
  if (!v->is_bool())
    throw ConfigError(source_ + ": key '" + key + "' must be true or false");
  return v->as_bool();
}

std::string ConfigTable::string_or(const std::string &key, const std::string &fallback) const {
  const ConfigValue *v = find(key);
  if (!v) return fallback;
  if (!v->is_string())
    throw ConfigError(source_ + ": key '" + key + "' must be a string");
  return v->as_string();
}

bool ConfigTable::has_section(const std::string &prefix) const {
  const auto it = values_.lower_bound(prefix);
  if (it == values_.end()) return false;
  return it->first == prefix ||
         (it->first.size() > prefix.size() && it->first.compare(0, prefix.size(), prefix) == 0 &&
          it->first[prefix.size()] == '.');
}

namespace {

std::size_t size_value(const ConfigTable &t, const std::string &key, std::size_t fallback) {
  const double v = t.number_or(key, static_cast<double>(fallback));
  if (v < 0.0 || v != std::floor(v))
    throw ConfigError(t.source() + ": key '" + key + "' must be a nonnegative integer");
  return static_cast<std::size_t>(v);
}

Vec number_array(const ConfigValue &v, const std::string &what) {
  if (!v.is_array()) throw ConfigError(what + " must be an array of numbers");
  Vec out;
  for (const ConfigValue &item : v.as_array()) {
    if (!item.is_number()) throw ConfigError(what + " must contain numbers only");
    out.push_back(item.as_number());
  }
  return out;
}

DenseOperator matrix_value(const ConfigTable &t, const std::string &key) {
  if (const ConfigValue *csv = t.find(key + ".csv")) {
    std::filesystem::path p(csv->as_string());
    if (p.is_relative() && !t.base_dir().empty())
      p = std::filesystem::path(t.base_dir()) / p;
    return DenseOperator::from_csv(p.string());
  }
  const ConfigValue &v = t.at(key + ".entries");
  if (!v.is_array()) throw ConfigError(t.source() + ": '" + key + ".entries' must be an array of rows");
  const auto &rows = v.as_array();
  if (rows.empty()) throw ConfigError(t.source() + ": '" + key + ".entries' is empty");
  std::vector<double> entries;
  std::size_t cols = 0;
  for (const ConfigValue &row : rows) {
    Vec r = number_array(row, t.source() + ": row of '" + key + ".entries'");
    if (cols == 0) cols = r.size();
    if (r.size() != cols) throw ConfigError(t.source() + ": ragged rows in '" + key + ".entries'");
    entries.insert(entries.end(), r.begin(), r.end());
  }
  return DenseOperator(rows.size(), cols, std::move(entries));
}

ProxFunction prox_value(const ConfigTable &t, const std::string &key) {
  const std::string kind = t.string_or(key + ".kind", "zero");
  const double weight = t.number_or(key + ".weight", 1.0);
  if (kind == "zero") return ProxFunction::zero();
  if (kind == "l1") return ProxFunction::l1(weight);
  if (kind == "l0") return ProxFunction::l0(weight);
  if (kind == "squared_l2") return ProxFunction::squared_l2(weight);
  if (kind == "box")
    return ProxFunction::box_indicator(t.number(key + ".lo"), t.number(key + ".hi"));
  throw ConfigError(t.source() + ": unknown function kind '" + kind + "' at '" + key + "'");
}

} // namespace

ProblemDescriptor parse_problem(const ConfigTable &table) {
  ProblemDescriptor d;
  d.name = table.string_or("problem.name", "");
  if (d.name.empty())
    throw ConfigError(table.source() + ": missing 'problem.name'");
  d.m = size_value(table, "problem.m", 0);
  d.q = size_value(table, "problem.q", 0);
  d.p = size_value(table, "problem.p", 0);
  const double seed = table.number_or("problem.seed", 0.0);
  if (seed < 0.0 || seed != std::floor(seed))
    throw ConfigError(table.source() + ": 'problem.seed' must be a nonnegative integer");
  d.seed = static_cast<std::uint64_t>(seed);
  d.base_dir = table.base_dir();

  if (d.name == "custom") {
    for (const auto &[key, value] : table.values())
      if (key.rfind("problem.", 0) == 0) d.custom_keys.emplace(key, value);
  }
  return d;
}

ProblemInstance instantiate(const ProblemDescriptor &d) {
  if (d.name == "convex_sanity") return make_convex_sanity(d.m ? d.m : 2);
  if (d.name == "tv_sparse_recovery") return make_tv_sparse_recovery(d.m ? d.m : 16, d.seed);
  if (d.name == "reduction_palm") return make_reduction_palm(d.m ? d.m : 3, d.q ? d.q : 2);
  if (d.name == "reduction_yfree")
    return make_reduction_yfree(d.m ? d.m : 4, d.p ? d.p : 3);
  if (d.name == "reduction_proxgrad") return make_reduction_proxgrad(d.q ? d.q : 4);
  if (d.name != "custom")
    throw ConfigError("unknown problem name '" + d.name + "'");

  // custom: rebuild a table view over the retained keys, one parsing path
  ConfigTable table = ConfigTable::parse(descriptor_to_config(d), "problem descriptor");
  table.set_base_dir(d.base_dir);

  ProblemInstance pb;
  pb.name = "custom";
  pb.seed = d.seed;
  pb.f = prox_value(table, "problem.f");
  pb.g = prox_value(table, "problem.g");
  pb.a = matrix_value(table, "problem.a");

  const std::string hkind = table.string_or("problem.h.kind", "separable");
  if (hkind == "quadratic") {
    DenseOperator k = matrix_value(table, "problem.h.k");
    DenseOperator mm = matrix_value(table, "problem.h.m");
    Vec b = number_array(table.at("problem.h.b"), "problem.h.b");
    pb.h = SmoothCoupling::quadratic(std::move(k), std::move(mm), std::move(b),
                                     table.number_or("problem.h.weight", 1.0));
  } else if (hkind == "separable") {
    Vec c = number_array(table.at("problem.h.c"), "problem.h.c");
    Vec dd = number_array(table.at("problem.h.d"), "problem.h.d");
    pb.h = SmoothCoupling::separable(table.number_or("problem.h.wx", 1.0), std::move(c),
                                     table.number_or("problem.h.wy", 1.0), std::move(dd));
  } else {
    throw ConfigError("unknown coupling kind '" + hkind + "'");
  }

  if (pb.h.x_dim() != pb.m())
    throw ConfigError("custom problem: coupling x-dimension does not match the operator");
  if (const ConfigValue *v = table.find("problem.inf_h")) pb.inf_h = v->as_number();
  pb.flags.f_coercive = pb.f.coercive();
  pb.flags.g_coercive = pb.g.coercive();
  pb.flags.h_coercive = pb.h.coercive();
  pb.flags.a_invertible = pb.a.rows() == pb.a.cols() && pb.a.surjective();
  return pb;
}

namespace {

void write_value(std::ostream &os, const ConfigValue &v);

void write_array(std::ostream &os, const ConfigValue::Array &a) {
  os << "[";
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) os << ", ";
    write_value(os, a[i]);
  }
  os << "]";
}

void write_value(std::ostream &os, const ConfigValue &v) {
  if (v.is_number()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v.as_number());
    os << buf;
  } else if (v.is_bool()) {
    os << (v.as_bool() ? "true" : "false");
  } else if (v.is_string()) {
    os << '"' << v.as_string() << '"';
  } else {
    write_array(os, v.as_array());
  }
}

} // namespace

std::string descriptor_to_config(const ProblemDescriptor &d) {
  std::ostringstream os;
  os << "[problem]\n";
  os << "name = \"" << d.name << "\"\n";
  if (d.m) os << "m = " << d.m << "\n";
  if (d.q) os << "q = " << d.q << "\n";
  if (d.p) os << "p = " << d.p << "\n";
  if (d.seed) os << "seed = " << d.seed << "\n";
  for (const auto &[key, value] : d.custom_keys) {
    if (key == "problem.name" || key == "problem.m" || key == "problem.q" ||
        key == "problem.p" || key == "problem.seed")
      continue;
    os << key.substr(std::string("problem.").size()) << " = ";
    write_value(os, value);
    os << "\n";
  }
  return os.str();
}

RunConfig parse_run_config(const ConfigTable &table) {
  RunConfig cfg;
  cfg.problem = parse_problem(table);

  const bool has_params = table.has_section("params");
  const bool has_tuning = table.has_section("tuning");
  if (has_params == has_tuning)
    throw ConfigError(table.source() +
                      ": exactly one of [params] and [tuning] must be present");
  if (has_params) {
    SolverParams p;
    p.mu = table.number("params.mu");
    p.beta = table.number("params.beta");
    p.tau = table.number("params.tau");
    p.sigma = table.number("params.sigma");
    cfg.params = p;
  } else {
    cfg.tuning_safety = table.number_or("tuning.safety", 0.5);
  }

  const double max_it = table.number_or("stopping.max_iterations", 1000.0);
  if (max_it < 1.0 || max_it != std::floor(max_it))
    throw ConfigError(table.source() + ": 'stopping.max_iterations' must be a positive integer");
  cfg.stopping.max_iterations = static_cast<std::uint64_t>(max_it);
  cfg.stopping.step_tol = table.number_or("stopping.step_tol", 1e-9);
  if (table.find("stopping.kkt_tol"))
    cfg.stopping.kkt_tol = table.number("stopping.kkt_tol");
  cfg.stopping.divergence_guard = table.number_or("stopping.divergence_guard", 1e12);

  cfg.strict_mode = table.boolean_or("run.strict_mode", true);
  cfg.output_dir = table.string_or("run.output_dir", "");

  if (table.find("diagnostics.loja_constant"))
    cfg.loja_constant = table.number("diagnostics.loja_constant");
  if (table.find("diagnostics.psi_star"))
    cfg.psi_star = table.number("diagnostics.psi_star");

  if (const ConfigValue *v = table.find("run.formats")) {
    cfg.write_csv = false;
    cfg.write_json = false;
    for (const ConfigValue &f : v->as_array()) {
      const std::string &s = f.as_string();
      if (s == "csv")
        cfg.write_csv = true;
      else if (s == "json")
        cfg.write_json = true;
      else
        throw ConfigError(table.source() + ": unknown format '" + s + "'");
    }
  }
  return cfg;
}

RunConfig parse_run_config_file(const std::string &path) {
  return parse_run_config(ConfigTable::parse_file(path));
}

} // namespace trisplit
