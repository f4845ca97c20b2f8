#pragma once

// Reversible jump-process generators on enumerated subsets of the cube, the
// recursive flip-swap construction for pi(p,k), reference walks, and the
// structural audits (detailed balance, flip-swap support, exit rate, stability).

#include "negdep/cond_bernoulli.hpp"
#include "negdep/cube.hpp"
#include "negdep/scalar.hpp"

#include <span>
#include <string>
#include <vector>

namespace negdep {

inline constexpr int kMaxRecursionDimFloat = 12;
inline constexpr int kMaxRecursionDimExact = 9;
inline constexpr std::size_t kMaxGeneratorStates = 4096;

/// Dense rate matrix Q over an ordered support, with its stationary law.
/// Off-diagonal rates are nonnegative and every row sums to zero.
template <Scalar T>
struct Generator {
  int n = 0;
  std::vector<CubeState> support;
  std::vector<T> stationary;
  std::vector<T> rates;  // row-major, size() x size()
  StateIndex index;

  std::size_t size() const { return support.size(); }
  T& rate(std::size_t x, std::size_t y) { return rates[x * size() + y]; }
  const T& rate(std::size_t x, std::size_t y) const { return rates[x * size() + y]; }
  DistributionTable<T> stationary_table() const { return {support, stationary}; }

  /// Sets each diagonal entry to minus its off-diagonal row sum.
  void fix_diagonal();
};

/// The recursive flip-swap generator L_pi for pi(p,k):
///   L_pi = (1/n) sum_l L^(l),
/// where L^(l) moves across the two values of coordinate l with the coupling
/// kernels (times P(X_l != x_l)) and otherwise acts as L for the conditioned
/// measure on the other coordinates.
template <Scalar T>
Generator<T> build_hermon_salez(std::span<const T> p, int k);

/// The component L^(l) of the construction above (before averaging over l).
template <Scalar T>
Generator<T> hermon_salez_component(std::span<const T> p, int k, int l);

/// Uniform measure on the k-slice; rate 1/n between swap neighbours.
template <Scalar T>
Generator<T> build_bernoulli_laplace(int n, int k);

/// Uniform measure on the whole cube; rate 1 for every single flip.
template <Scalar T>
Generator<T> build_glauber_uniform(int n);

/// Sum of generators acting on disjoint coordinate blocks; the first
/// generator owns the lowest coordinates. Stationary law is the product.
template <Scalar T>
Generator<T> tensorize(std::span<const Generator<T>> gens);

template <Scalar T>
Generator<T> scaled(const Generator<T>& g, const T& factor);

Generator<double> to_float(const Generator<Rational>& g);

/// max_{x,y} |pi(x)Q(x,y) - pi(y)Q(y,x)|.
template <Scalar T>
T check_detailed_balance(const Generator<T>& g);

/// True iff every positive off-diagonal rate joins a flip or a swap pair.
template <Scalar T>
bool check_flip_swap(const Generator<T>& g);

/// Largest |row sum| together with the most negative off-diagonal rate
/// (reported as a positive number, zero when all rates are nonnegative).
template <Scalar T>
struct RowAudit {
  T max_row_sum;
  T max_negative_rate;
};

template <Scalar T>
RowAudit<T> audit_rows(const Generator<T>& g);

/// Delta(L) = max_x -Q(x,x).
template <Scalar T>
T delta(const Generator<T>& g);

/// max over x with pi(x) > 0 and coordinates i of sum_{y: y_i != x_i} Q(x,y).
template <Scalar T>
T stability_functional(const Generator<T>& g);

/// Upper bound on the best stability constant: stability_functional / rho_lower.
template <Scalar T>
double stability_constant(const Generator<T>& g, double rho_lower);

/// JSON header line: {"n", "k", "p", "support_size"}; k and p may be absent.
std::string generator_header_json(const Generator<double>& g, int k, std::span<const double> p);
/// CSV rows "source,target,rate" for nonzero off-diagonal rates.
std::string generator_rates_csv(const Generator<double>& g);

}  // namespace negdep
