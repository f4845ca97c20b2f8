#pragma once

// Random test instances, exhaustive and Monte Carlo tails, and the experiment
// dispatcher behind the command line tool.

#include "negdep/cond_bernoulli.hpp"
#include "negdep/cube.hpp"
#include "negdep/hermitian.hpp"
#include "negdep/lab/config.hpp"
#include "negdep/lab/report.hpp"
#include "negdep/polynomial.hpp"
#include "negdep/random.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace negdep::lab {

/// p_i uniform in [0.05, 0.95].
std::vector<double> random_p(int n, RandomStream& rng);
/// Nonincreasing weights in [0.1, 1].
WeightVector random_alpha(int n, RandomStream& rng);

/// f(x) = min_j (offset_j + d_alpha(x, anchor_j)), which is 1-Lipschitz for d_alpha.
struct InfConvolution {
  WeightVector alpha;
  std::vector<CubeState> anchors;
  std::vector<double> offsets;
  double operator()(const CubeState& x) const;
};
InfConvolution random_inf_convolution(const WeightVector& alpha, int anchors, RandomStream& rng);

Hermitian random_hermitian(int d, double scale, RandomStream& rng);
Hermitian random_psd(int d, double scale, RandomStream& rng);

/// f(x) = sum_i x_i A_i + s(x) I with an optional scalar inf-convolution s.
/// (f(x) - f(x^i))^2 <= (|A_i| + beta_i I)^2, and f is d_alpha-Lipschitz in
/// operator norm with alpha_i = ||A_i|| + beta_i.
struct MatrixFunction {
  int n = 0;
  int d = 1;
  std::vector<Hermitian> a;
  std::optional<InfConvolution> scalar;

  Hermitian operator()(const CubeState& x) const;
  std::vector<Hermitian> certified_c() const;
  WeightVector lipschitz_alpha() const;
  bool linear_psd() const;
};
/// type: "linear" (Hermitian A_i), "linear-psd" or "linear-plus-scalar".
MatrixFunction random_matrix_function(int n, int d, const std::string& type, RandomStream& rng);

/// Degree-d polynomial with a few random terms of each order up to d.
TetrahedralPolynomial random_polynomial(int n, int degree, RandomStream& rng);

/// Exact P(stat > t) (or >= t when `inclusive`) on the grid.
TailReport exhaustive_tail(std::span<const double> probs, std::span<const double> stat, std::span<const double> t_grid,
                           bool inclusive = false);

/// Empirical tail of draw(rng) with trial i using RandomStream::derive(seed, i).
TailReport mc_tail(const std::function<double(RandomStream&)>& draw, std::span<const double> t_grid,
                   std::uint64_t trials, std::uint64_t seed, bool inclusive = false);

/// Smallest m with P(stat <= m) >= 1/2 over a finite law.
double median(std::span<const double> probs, std::span<const double> values);

struct RunResult {
  int exit_code = 0;
  std::vector<std::string> files;
  std::string summary;  // one line
};

/// Runs the experiment and writes <out_dir>/<prefix>.csv and .json (plus
/// kind-specific extra files). exit_code is 1 iff an assertion failed.
RunResult run(const ExperimentConfig& config);

}  // namespace negdep::lab
