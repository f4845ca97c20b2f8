#pragma once

// Convex distance d_T(x, A) as a quadratic program over the simplex on A,
// the exponential Talagrand functional, and the checks used in its proof.
//
//   d_T^2(x, A) = min_{mu in M(A)} sum_i mu(z: z_i != x_i)^2
//
// Only the difference sets {i: z_i != x_i} matter. Duplicate sets are merged
// and sets containing another one are dropped before solving, since moving
// mass to a subset never increases any coordinate of c(mu).

#include "negdep/cond_bernoulli.hpp"
#include "negdep/cube.hpp"
#include "negdep/generator.hpp"

#include <span>
#include <string>
#include <vector>

namespace negdep {

struct ConvexDistanceResult {
  double value = 0.0;
  double squared = 0.0;
  std::vector<double> optimal_mu;  // weights over A in input order
  std::vector<double> dual_alpha;  // c(mu*)/|c(mu*)|, zero vector when x is in A
  double gap = 0.0;                // primal value minus the dual value of dual_alpha
  int iterations = 0;
};

/// Frank-Wolfe with away steps and exact line search, then an active-set
/// polish of the KKT system on the support. Throws on empty A.
ConvexDistanceResult convex_distance(const CubeState& x, std::span<const CubeState> a);

/// d_T^2(x, A) for every x of the support.
std::vector<double> convex_distance_squared(std::span<const CubeState> support, std::span<const CubeState> a);

struct TalagrandValue {
  double measure = 0.0;  // pi(A)
  double value = 0.0;    // pi(A) * pi(exp(d_T^2 / divisor))
  double plain = 0.0;    // pi(A) * pi(d_T^2 / divisor)
  bool vacuous = false;  // pi(A) = 0
  double max_gap = 0.0;
};

/// States of A outside the support carry no mass but still enter d_T.
TalagrandValue talagrand_functional(const DistributionTable<double>& pi, std::span<const CubeState> a,
                                    double divisor);

/// Same from a precomputed d_T^2 table.
TalagrandValue talagrand_from_squared(const DistributionTable<double>& pi, double measure,
                                      std::span<const double> squared, double divisor);

/// min(1, 4 exp(-t^2 / (84 L^2))).
double cor32_bound(double lipschitz, double t);

struct Lemma62Check {
  bool pass = true;
  double worst_gamma_excess = 0.0;  // max_x Gamma_+(d^2)(x) - 8 stab d^2(x)
  double worst_pair_excess = 0.0;   // max_{x,y} d^2(x) - d^2(y) - d_H(x,y)
  double stability = 0.0;
};

/// Both inequalities, with R rho(L) taken as stability_functional(g).
Lemma62Check check_lemma62(const Generator<double>& g, std::span<const CubeState> a);

struct BobkovGotzeCheck {
  bool precondition = true;  // Gamma_+(f) <= C f everywhere
  bool pass = false;
  double lhs = 0.0;  // pi(exp(f/t))
  double rhs = 0.0;  // exp(pi(f) / (t - C/rho))
};

/// pi(exp(f/t)) <= exp(pi(f)/(t - C/rho)) for f >= 0 with Gamma_+(f) <= C f.
/// Throws if f < 0 somewhere or t <= C/rho.
BobkovGotzeCheck bobkov_gotze_check(const Generator<double>& g, std::span<const double> f, double c, double t,
                                    double rho_lower = 1.0);

}  // namespace negdep
