#pragma once

// Experiment configuration files (JSON).
//
// {
//   "kind": "lipschitz-tail",
//   "distribution": {"p": [0.3, 0.5, 0.6, 0.2], "k": 2},   or {"n": 8, "k": 3} for random p
//   "function": {"type": "inf-convolution", "anchors": 4},
//   "t_grid": [0.5, 1.0, 1.5]  or {"start": 0.1, "stop": 3.0, "count": 30},
//   "trials": 100000, "seed": 7, "mode": "exact" | "mc",
//   "output": {"dir": "out", "prefix": "run"}
// }
//
// Kind-specific keys are listed with ExperimentConfig.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace negdep::lab {

enum class ExperimentKind {
  lipschitz_tail,
  matrix_tail,
  talagrand,
  polynomial_tail,
  generator_audit,
  martingale_audit,
  coupling_audit,
  norms,
};

const char* kind_name(ExperimentKind k);
ExperimentKind kind_from_name(const std::string& name);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::lipschitz_tail;

  // Distribution pi(p, k); p drawn from the seed when not given.
  int n = 0;
  int k = 0;
  std::vector<double> p;

  // Function spec, interpreted per kind. "type" is one of
  //   inf-convolution | linear (scalar tails, martingale audit)
  //   linear | linear-psd | linear-plus-scalar (matrix tails)
  nlohmann::json function = nlohmann::json::object();
  std::vector<double> alpha;  // weights; random nonincreasing when empty

  std::vector<double> t_grid;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  bool exact = true;
  std::string out_dir = "out";
  std::string prefix;

  // talagrand
  double divisor = 84.0;
  std::string sets = "all";      // all | random
  std::uint64_t set_count = 1000;
  // generator-audit
  bool corrupt = false;
  bool rational = false;
  // matrix-tail
  int matrix_dim = 2;
  // polynomial-tail / norms
  int degree = 2;
  double R = 2.0;
  double cd = 1.0;
  int restarts = 64;
};

/// Parses and validates; errors name the offending field and, for JSON syntax
/// errors, the byte position.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

std::vector<double> linear_grid(double start, double stop, int count);

}  // namespace negdep::lab
