#pragma once

// Doob martingales of f(X) along three revealing schemes, computed exactly
// from an explicit distribution table, and the Azuma/Freedman type bounds.
//
//   F: reveal X_1, X_2, ... in coordinate order (n steps).
//   G: reveal X_1..X_k, then the remaining ones in uniformly random order
//      (k more steps; once all ones are known the dummy position 0 is revealed).
//   H: reveal the ones of X in uniformly random order (k steps).
//
// For G and H the conditional expectation given the revealed history equals
// the expectation given {revealed bits, X_v = 1 for every revealed position v},
// so increments are differences of two plain conditional expectations.
// Coordinates are 0-based here; the dummy position is stored as -1.

#include "negdep/cond_bernoulli.hpp"
#include "negdep/cube.hpp"
#include "negdep/hermitian.hpp"
#include "negdep/scalar.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace negdep {

enum class Scheme { F, G, H };

inline constexpr int kDummyPosition = -1;

struct PrefixEvent {
  Scheme scheme = Scheme::F;
  std::vector<int> bits;       // F, G: values of coordinates 0..bits.size()-1
  std::vector<int> positions;  // G: revealed ones among coordinates >= k; H: v_1..v_l

  int step() const { return static_cast<int>(bits.size() + positions.size()); }
  /// The event one step earlier.
  PrefixEvent parent() const;
  std::string to_string() const;
};

const char* scheme_name(Scheme s);

/// The common number of ones of the support; throws if it varies.
template <Scalar T>
int homogeneity_level(const DistributionTable<T>& pi);

/// Throws std::invalid_argument if the prefix is malformed for its scheme or
/// has zero probability under pi.
template <Scalar T>
void validate_prefix(const DistributionTable<T>& pi, const PrefixEvent& e);

/// Law of X given the (reduced) conditioning event, as weights over the support.
template <Scalar T>
std::vector<T> conditional_law(const DistributionTable<T>& pi, const PrefixEvent& e);

/// Probability of the revealed history itself, including the uniform ordering
/// factors of schemes G and H.
template <Scalar T>
T prefix_probability(const DistributionTable<T>& pi, const PrefixEvent& e);

/// E[f | e] - E[f | parent(e)].
template <Scalar T>
T increment(const DistributionTable<T>& pi, std::span<const T> f, const PrefixEvent& e);
Hermitian increment(const DistributionTable<double>& pi, std::span<const Hermitian> f, const PrefixEvent& e);

template <Scalar T>
T increment_F(const DistributionTable<T>& pi, std::span<const T> f, const PrefixEvent& e);
template <Scalar T>
T increment_G(const DistributionTable<T>& pi, std::span<const T> f, const PrefixEvent& e);
template <Scalar T>
T increment_H(const DistributionTable<T>& pi, std::span<const T> f, const PrefixEvent& e);

/// Number of steps of the scheme: n for F, 2k for G, k for H.
int scheme_length(Scheme s, int n, int k);

/// Every positive-probability history of steps 1..scheme_length.
template <Scalar T>
std::vector<PrefixEvent> enumerate_prefixes(const DistributionTable<T>& pi, Scheme s);

/// The histories along which x is revealed, with ones revealed in increasing
/// coordinate order (or in `order` when given). Element l is the step-(l+1) event.
std::vector<PrefixEvent> revealing_path(Scheme s, const CubeState& x, int k,
                                        std::span<const int> order = {});

/// Bound on |increment| from the Lipschitz lemmas for nonincreasing alpha:
/// 2 alpha_l for F, 2 alpha_{min(l,k)} for G (steps 1-based).
double lipschitz_increment_bound(Scheme s, int step, const WeightVector& alpha, int k);

/// exp(-t^2 / (2 sum c_l^2)), clamped to [0,1].
double azuma_bound(std::span<const double> c, double t);
/// d exp(-t^2 / (8 sigma2)); not clamped.
double azuma_matrix_bound(int d, double sigma2, double t);
/// 2d exp(-t^2 / (2 sigma2 + 2 a t / 3)).
double freedman_matrix_bound(int d, double a, double sigma2, double t);

/// exp(-t^2/(8|alpha|^2)), and with k given also exp(-t^2/(16 sum_{i<=k} (alpha_i^down)^2));
/// returns the smaller value.
double thm22_bound(const WeightVector& alpha, double t, std::optional<int> k = std::nullopt);
/// Matrix analogue with constants 32 and 64, times d.
double thm23_bound(int d, const WeightVector& alpha, double t, std::optional<int> k = std::nullopt);
/// d exp(-t^2 / (8k + 2t sqrt(2k))).
double aoun_bound(int d, int k, double t);
/// d exp(-t^2 / (8 norm log(ek) + (4/3) K t)); the log factor can be switched off
/// for comparison runs.
double thm24_bound(int d, double norm_pi_ftilde, double K, int k, double t, bool with_log = true);

struct Crossover {
  double closed_form = 0.0;  // smallest t beyond which thm23 < aoun
  double numeric = 0.0;      // the same threshold located by bisection
};

/// Crossover for the homogeneous matrix bound with denominator 64 * top_sum
/// (top_sum = sum_{i<=k} (alpha_i^down)^2) against aoun_bound(., k, .).
Crossover thm23_aoun_crossover(int k, double top_sum);

}  // namespace negdep
