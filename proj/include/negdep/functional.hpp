#pragma once

// Dirichlet forms, carre du champ, entropy, spectral gap, a numerical mLSI
// estimate, and the scalar tail bounds derived from them.

#include "negdep/cube.hpp"
#include "negdep/generator.hpp"
#include "negdep/scalar.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace negdep {

/// One value per support state of a generator, in support order.
template <Scalar T>
using FunctionTable = std::vector<T>;

/// Gamma(f,h)(x) = 1/2 sum_y (f(x)-f(y))(h(x)-h(y)) Q(x,y).
template <Scalar T>
T gamma(const Generator<T>& g, std::span<const T> f, std::span<const T> h, std::size_t x);

template <Scalar T>
T gamma(const Generator<T>& g, std::span<const T> f, std::size_t x) {
  return gamma<T>(g, f, f, x);
}

/// Gamma_+(f)(x) = sum_y (f(x)-f(y))_+^2 Q(x,y).
template <Scalar T>
T gamma_plus(const Generator<T>& g, std::span<const T> f, std::size_t x);

/// E(f,h) = -sum_x pi(x) f(x) (Qh)(x).
template <Scalar T>
T dirichlet(const Generator<T>& g, std::span<const T> f, std::span<const T> h);

/// pi(f).
template <Scalar T>
T expectation(std::span<const T> pi, std::span<const T> f);

/// Ent_pi(f) = pi(f log f) - pi(f) log pi(f), with 0 log 0 = 0.
double entropy(std::span<const double> pi, std::span<const double> f);

/// Var_pi(f).
double variance(std::span<const double> pi, std::span<const double> f);

/// Smallest nonzero eigenvalue of D^{1/2}(-Q)D^{-1/2}; throws if the
/// generator is reducible on its support (second eigenvalue numerically zero).
double spectral_gap(const Generator<double>& g);

/// E(f, log f) / Ent(f) for positive f (infinite when Ent(f) = 0).
double mlsi_ratio(const Generator<double>& g, std::span<const double> f);

struct MlsiOptions {
  int restarts = 200;
  double tol = 1e-10;       // relative change of the ratio between iterations
  int max_iterations = 2000;
  std::uint64_t seed = 0x6d6c7369ULL;
};

struct MlsiResult {
  double estimate = 0.0;              // smallest ratio found: an upper bound on rho(L)
  int restarts = 0;
  int degenerate = 0;                 // restarts that collapsed to a constant function
  int converged = 0;
  std::vector<double> worst_candidate;  // the minimizing f, normalized to pi(f) = 1
};

/// Multi-start descent on u = log f of E(e^u, u) / Ent(e^u). Besides the random
/// restarts, a small perturbation along the spectral-gap eigenvector is tried,
/// which tracks the limit of the ratio near constants. Throws if every
/// candidate degenerates.
MlsiResult mlsi_upper_estimate(const Generator<double>& g, const MlsiOptions& options = {});

/// Herbst: exp(-t^2 rho / (4 gp_sup)), clamped to [0,1].
double herbst_bound(double rho, double gp_sup, double t);

/// min(exp(-t^2 / (8 R |alpha|^2)), exp(-t^2 / (16 sum_{i <= ceil(delta/(R rho))} (alpha_i^down)^2))).
double prop46_bound(double R, double delta, double rho, const WeightVector& alpha, double t);

/// sqrt(3 sqrt(e) / (sqrt(e) - 1)).
double moment_constant();

struct MomentCheck {
  bool pass = false;
  double lhs = 0.0;    // ||(f - pi f)_+||_p
  double rhs = 0.0;    // C sqrt(p/rho) ||sqrt(Gamma_+ f)||_p
  double ratio = 0.0;  // lhs / rhs (0 when both vanish)
};

/// Exact L^p check of the moment estimate over the support.
MomentCheck moment_check(const Generator<double>& g, std::span<const double> f, double p,
                         double rho_lower);

/// {"gap", "mlsi_estimate", "restarts", "worst_candidate"}.
std::string audit_report_json(double gap, const MlsiResult& mlsi);

}  // namespace negdep
