#pragma once

// Tetrahedral (multilinear) polynomials on the cube, their derivative tensors,
// injective tensor norms over index partitions, and the polynomial tail bound.
//
// Indices are 0-based. A partition of [r] is a list of blocks, each a sorted
// list of tensor positions; blocks are ordered by their smallest element.

#include "negdep/cond_bernoulli.hpp"
#include "negdep/cube.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace negdep {

inline constexpr int kMaxWalshDim = 20;
inline constexpr int kMaxPartitionOrder = 6;

class TetrahedralPolynomial {
 public:
  TetrahedralPolynomial() = default;
  explicit TetrahedralPolynomial(int n) : n_(n) {}
  /// Coefficients keyed by the subset bitmask; zero entries are dropped.
  TetrahedralPolynomial(int n, std::map<std::uint64_t, double> coeffs);

  int n() const { return n_; }
  int degree() const;
  const std::map<std::uint64_t, double>& coeffs() const { return coeffs_; }
  double coeff(std::uint64_t subset) const;
  void set(std::uint64_t subset, double value);

  double evaluate(const CubeState& x) const;
  /// Multilinear extension at a real point.
  double evaluate(std::span<const double> x) const;

 private:
  int n_ = 0;
  std::map<std::uint64_t, double> coeffs_;
};

/// Moebius inversion of a table indexed by packed state value (enumerate_cube order).
TetrahedralPolynomial walsh_transform(int n, std::span<const double> f);

class IndexTensor {
 public:
  IndexTensor() = default;
  IndexTensor(int order, int n);

  int order() const { return order_; }
  int n() const { return n_; }
  std::size_t size() const { return data_.size(); }
  /// Linear offset with the first index varying fastest.
  std::size_t offset(std::span<const int> idx) const;
  double& at(std::span<const int> idx) { return data_[offset(idx)]; }
  double at(std::span<const int> idx) const { return data_[offset(idx)]; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }
  double frobenius() const;

 private:
  int order_ = 0;
  int n_ = 0;
  std::vector<double> data_;
};

/// Entry (i_1..i_r) is the mixed partial of the multilinear extension at x,
/// zero on repeated indices.
IndexTensor derivative_tensor(const TetrahedralPolynomial& f, int r, const CubeState& x);
/// pi-average of derivative_tensor over the support.
IndexTensor mean_derivative(const DistributionTable<double>& pi, const TetrahedralPolynomial& f, int r);

using Partition = std::vector<std::vector<int>>;

/// All Bell(r) partitions of {0..r-1}, for 1 <= r <= 6.
std::vector<Partition> partitions(int r);
/// Block notation with 1-based positions, e.g. "{1,2}{3}".
std::string partition_to_string(const Partition& p);

enum class NormMode { fast, certified };

struct NormResult {
  double value = 0.0;
  std::string method;  // "closed-form", "alternating" or "grid-checked"
  bool exact = false;  // false means a lower bound on the supremum
};

struct NormOptions {
  NormMode mode = NormMode::fast;
  int restarts = 64;
  double tol = 1e-10;
  int max_sweeps = 10000;
  std::uint64_t seed = 0x6e6f726dULL;
};

/// sup of the multilinear form over unit vectors, one per block of J.
/// Single block: Frobenius norm. Two blocks: largest singular value of the
/// matricization. More blocks: best of alternating maximization restarts,
/// which is a lower bound on the supremum.
NormResult injective_norm(const IndexTensor& a, const Partition& j, const NormOptions& options = {});

/// Value of the multilinear form at given block vectors (each of length n^{|block|}).
double multilinear_form(const IndexTensor& a, const Partition& j, std::span<const std::vector<double>> vectors);

struct PolyTailTerm {
  int r = 0;
  Partition partition;
  double norm = 0.0;
  std::string method;
};

struct PolyTailBound {
  double bound = 2.0;
  double exponent = 0.0;  // min_r min_J (t / (R^{r/2} ||pi nabla^r f||_J))^{2/|J|}, before dividing by Cd
  int r = 0;
  Partition partition;
};

/// All nonzero norms ||pi(nabla^r f)||_J for r <= degree.
std::vector<PolyTailTerm> polynomial_norms(const DistributionTable<double>& pi, const TetrahedralPolynomial& f,
                                           const NormOptions& options = {});

/// 2 exp(-(1/Cd) min_r min_J (t / (R^{r/2} ||pi nabla^r f||_J))^{2/|J|}).
PolyTailBound thm38_bound(std::span<const PolyTailTerm> norms, double t, double R, double cd);
double thm38_exponent(const DistributionTable<double>& pi, const TetrahedralPolynomial& f, double t, double R,
                      double cd);

/// Smallest Cd for which 2 exp(-exponent/Cd) >= tail, or 0 if any Cd works.
double required_cd(double exponent, double tail);

}  // namespace negdep
