#pragma once

// Hermitian matrices, the PSD order, variance proxies over coordinate subsets,
// matrix tail bounds, and the matrix carre du champ.

#include "negdep/generator.hpp"

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace negdep {

using Hermitian = Eigen::MatrixXcd;

inline constexpr int kMaxHermitianDim = 64;
inline constexpr double kSubsetGuard = 1e6;

/// Throws unless square, d <= 64 and equal to its adjoint within 1e-12.
void require_hermitian(const Hermitian& a);

double lambda_max(const Hermitian& a);
double lambda_min(const Hermitian& a);
double op_norm(const Hermitian& a);

/// True iff lambda_min(b - a) >= -tol.
bool psd_leq(const Hermitian& a, const Hermitian& b, double tol = 1e-10);

Hermitian identity_matrix(int d);
Hermitian square(const Hermitian& a);
/// Principal square root |A| = (A^2)^{1/2}.
Hermitian abs_matrix(const Hermitian& a);

enum class ProxyMode { exact, upper };

struct Proxy {
  double value = 0.0;
  bool exact = true;  // false when the top-norms upper bound was used
};

/// Calls visit(subset) for every m-subset of [0,n) in lexicographic order.
template <typename F>
void for_each_subset(int n, int m, F&& visit) {
  if (m < 0 || m > n) return;
  std::vector<int> idx(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (;;) {
    visit(std::span<const int>(idx));
    int i = m - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - m + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < m; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

/// max over |I| = m of ||sum_{i in I} D_i||; falls back to the sum of the m
/// largest norms when C(n,m) exceeds the enumeration guard (or mode = upper).
Proxy subset_sup(std::span<const Hermitian> d, int m, ProxyMode mode = ProxyMode::exact);

/// 16 sup_{|I|=k} ||sum_I C_i^2||.
Proxy sigma_thm35(std::span<const Hermitian> c, int k, ProxyMode mode = ProxyMode::exact);
/// 8 sup_{|I|<=k} (||sum_I C_i^2|| + k max_{i not in I} ||C_i^2||).
Proxy sigma_rem37(std::span<const Hermitian> c, int k);
/// 8R sup_{|I| = ceil(delta/(R rho))} ||sum_I C_i^2||, subset size capped at n.
Proxy sigma_prop47(std::span<const Hermitian> c, double R, double delta, double rho);

/// d exp(-t^2 / (sigma^2 + sigma t)).
double thm35_bound(int d, double sigma, double t);

/// 1/2 sum_y (f(x)-f(y))^2 Q(x,y) for a matrix-valued table over the support.
Hermitian matrix_gamma(const Generator<double>& g, std::span<const Hermitian> f, std::size_t x);

/// d exp(-t^2 / (2 C_P v_f + t sqrt(2 C_P v_f))).
double aoun_matrix_bound(int d, double c_p, double v_f, double t);

struct SubsetLemma {
  double lhs = 0.0;
  double rhs = 0.0;
  int subset_size = 0;
};

/// lhs = ||sum t_i D_i||, rhs = Tinf max_{|I| <= ceil(T1/Tinf)} ||sum_I D_i||.
SubsetLemma km_subset_bound(std::span<const double> t, std::span<const Hermitian> d, double t1, double tinf);

/// Dense JSON form: array of rows, each entry a [real, imag] pair.
Hermitian hermitian_from_json(const std::string& text);

}  // namespace negdep
