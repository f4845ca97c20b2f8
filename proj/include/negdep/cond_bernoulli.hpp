#pragma once

// Independent Bernoulli(p_i) variables conditioned on their sum: pi(p,k).
//
// All distribution quantities come from one suffix table
//   T(j, m) = P(B_j + ... + B_{n-1} = m),
// shared by the pmf normalizer, the exact sampler and inclusion probabilities.

#include "negdep/cube.hpp"
#include "negdep/random.hpp"
#include "negdep/scalar.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace negdep {

/// Finite measure listed explicitly. Probabilities are positive and sum to one.
template <Scalar T>
struct DistributionTable {
  std::vector<CubeState> support;
  std::vector<T> probs;

  std::size_t size() const { return support.size(); }
  int dim() const { return support.empty() ? 0 : support.front().size(); }
  /// Index of x in the support, or -1.
  std::ptrdiff_t index_of(const CubeState& x) const;
  T total() const;
};

template <Scalar T>
class CondBernoulliSpec {
 public:
  CondBernoulliSpec(std::vector<T> p, int k);

  int n() const { return static_cast<int>(p_.size()); }
  int k() const { return k_; }
  const std::vector<T>& p() const { return p_; }

  /// T(j, m) for 0 <= j <= n, 0 <= m <= n; zero outside the reachable range.
  const T& suffix(int j, int m) const;
  /// P(kappa(B) = k).
  const T& normalizer() const { return suffix(0, k_); }

 private:
  std::vector<T> p_;
  int k_;
  std::vector<T> suffix_;  // (n+1) x (n+2), row-major
};

using CondBernoulli = CondBernoulliSpec<double>;
using ExactCondBernoulli = CondBernoulliSpec<Rational>;

/// P(sum_i B_i = m) by the forward recursion over coordinates.
template <Scalar T>
T poisson_binomial(std::span<const T> p, int m);

template <Scalar T>
T pmf(const CondBernoulliSpec<T>& spec, const CubeState& x);

/// Exact draw by sequential conditioning on the suffix table.
CubeState sample(const CondBernoulli& spec, RandomStream& rng);

template <Scalar T>
T inclusion_probability(const CondBernoulliSpec<T>& spec, int i);

/// Law of the remaining coordinates given x_S = values. Coordinates keep their
/// relative order. `coords` must be distinct; `values` has one bit per coord.
template <Scalar T>
CondBernoulliSpec<T> condition(const CondBernoulliSpec<T>& spec, std::span<const int> coords,
                               std::span<const int> values);

template <Scalar T>
DistributionTable<T> to_table(const CondBernoulliSpec<T>& spec);

/// Exact spec from double parameters (each double converted exactly).
ExactCondBernoulli to_exact(const CondBernoulli& spec);
CondBernoulli to_float(const ExactCondBernoulli& spec);
DistributionTable<double> to_float(const DistributionTable<Rational>& table);

// JSON form {"p": [..], "k": int}; p entries may be numbers or "a/b" strings.
std::string spec_to_json(const CondBernoulli& spec);
CondBernoulli spec_from_json(const std::string& text);
ExactCondBernoulli exact_spec_from_json(const std::string& text);

/// CSV rows "state,probability" with 17 significant digits.
std::string table_to_csv(const DistributionTable<double>& table);

}  // namespace negdep
