#include "negdep/lab/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace negdep::lab {

namespace {

const std::map<std::string, ExperimentKind>& kinds() {
  static const std::map<std::string, ExperimentKind> table = {
      {"lipschitz-tail", ExperimentKind::lipschitz_tail},   {"matrix-tail", ExperimentKind::matrix_tail},
      {"talagrand", ExperimentKind::talagrand},             {"polynomial-tail", ExperimentKind::polynomial_tail},
      {"generator-audit", ExperimentKind::generator_audit}, {"martingale-audit", ExperimentKind::martingale_audit},
      {"coupling-audit", ExperimentKind::coupling_audit},   {"norms", ExperimentKind::norms},
  };
  return table;
}

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

template <typename T>
T get(const nlohmann::json& j, const std::string& field, const T& fallback) {
  if (!j.contains(field)) return fallback;
  try {
    return j.at(field).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(field, e.what());
  }
}

}  // namespace

const char* kind_name(ExperimentKind k) {
  for (const auto& [name, kind] : kinds()) {
    if (kind == k) return name.c_str();
  }
  return "?";
}

ExperimentKind kind_from_name(const std::string& name) {
  const auto it = kinds().find(name);
  if (it == kinds().end()) fail("kind", "unknown experiment kind '" + name + "'");
  return it->second;
}

std::vector<double> linear_grid(double start, double stop, int count) {
  if (count < 1) fail("t_grid.count", "must be >= 1");
  if (count == 1) return {start};
  std::vector<double> g;
  for (int i = 0; i < count; ++i) g.push_back(start + (stop - start) * i / (count - 1));
  return g;
}

ExperimentConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config is not valid JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  if (!j.contains("kind")) fail("kind", "missing");
  c.kind = kind_from_name(get<std::string>(j, "kind", ""));

  if (j.contains("distribution")) {
    const auto& d = j["distribution"];
    if (!d.is_object()) fail("distribution", "must be an object");
    c.p = get<std::vector<double>>(d, "p", {});
    c.n = get<int>(d, "n", static_cast<int>(c.p.size()));
    c.k = get<int>(d, "k", 0);
    if (!c.p.empty() && static_cast<int>(c.p.size()) != c.n) fail("distribution.n", "differs from the length of p");
    for (double v : c.p) {
      if (!(v > 0.0 && v < 1.0)) fail("distribution.p", "entries must lie in (0,1)");
    }
  }
  if (c.n < 1) fail("distribution.n", "must be >= 1");
  if (c.k < 0 || c.k > c.n) fail("distribution.k", "must lie in [0, n]");

  if (j.contains("function")) {
    c.function = j["function"];
    if (!c.function.is_object()) fail("function", "must be an object");
    c.alpha = get<std::vector<double>>(c.function, "alpha", {});
    for (double a : c.alpha) {
      if (a < 0.0) fail("function.alpha", "weights must be nonnegative");
    }
    if (!c.alpha.empty() && static_cast<int>(c.alpha.size()) != c.n) fail("function.alpha", "length must be n");
  }

  if (j.contains("t_grid")) {
    const auto& t = j["t_grid"];
    if (t.is_array()) {
      c.t_grid = get<std::vector<double>>(j, "t_grid", {});
    } else if (t.is_object()) {
      c.t_grid = linear_grid(get<double>(t, "start", 0.0), get<double>(t, "stop", 1.0), get<int>(t, "count", 10));
    } else {
      fail("t_grid", "must be an array or {start, stop, count}");
    }
    for (std::size_t i = 1; i < c.t_grid.size(); ++i) {
      if (!(c.t_grid[i] > c.t_grid[i - 1])) fail("t_grid", "must be strictly increasing");
    }
    for (double v : c.t_grid) {
      if (v < 0.0) fail("t_grid", "entries must be nonnegative");
    }
  }

  c.trials = get<std::uint64_t>(j, "trials", c.trials);
  if (c.trials < 1) fail("trials", "must be >= 1");
  c.seed = get<std::uint64_t>(j, "seed", c.seed);
  const auto mode = get<std::string>(j, "mode", "exact");
  if (mode != "exact" && mode != "mc") fail("mode", "must be 'exact' or 'mc'");
  c.exact = mode == "exact";
  if (j.contains("output")) {
    c.out_dir = get<std::string>(j["output"], "dir", c.out_dir);
    c.prefix = get<std::string>(j["output"], "prefix", c.prefix);
  }
  if (c.prefix.empty()) c.prefix = kind_name(c.kind);

  c.divisor = get<double>(j, "divisor", c.divisor);
  if (!(c.divisor > 0.0)) fail("divisor", "must be positive");
  c.sets = get<std::string>(j, "sets", c.sets);
  if (c.sets != "all" && c.sets != "random") fail("sets", "must be 'all' or 'random'");
  c.set_count = get<std::uint64_t>(j, "set_count", c.set_count);
  c.corrupt = get<bool>(j, "corrupt", c.corrupt);
  c.rational = get<bool>(j, "rational", c.rational);
  c.matrix_dim = get<int>(j, "matrix_dim", c.matrix_dim);
  if (c.matrix_dim < 1 || c.matrix_dim > 64) fail("matrix_dim", "must lie in [1, 64]");
  c.degree = get<int>(j, "degree", c.degree);
  if (c.degree < 1 || c.degree > 4) fail("degree", "must lie in [1, 4]");
  c.R = get<double>(j, "R", c.R);
  c.cd = get<double>(j, "cd", c.cd);
  if (!(c.R > 0.0) || !(c.cd > 0.0)) fail("R/cd", "must be positive");
  c.restarts = get<int>(j, "restarts", c.restarts);
  if (c.restarts < 1) fail("restarts", "must be >= 1");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace negdep::lab
