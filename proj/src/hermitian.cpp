#include "negdep/hermitian.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace negdep {

namespace {

Eigen::VectorXd eigenvalues(const Hermitian& a) {
  require_hermitian(a);
  Eigen::SelfAdjointEigenSolver<Hermitian> solver(a, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

std::vector<Hermitian> squares(std::span<const Hermitian> c) {
  std::vector<Hermitian> out;
  out.reserve(c.size());
  for (const auto& m : c) out.push_back(square(m));
  return out;
}

void require_same_dims(std::span<const Hermitian> d) {
  for (const auto& m : d) {
    require_hermitian(m);
    if (m.rows() != d.front().rows()) throw std::invalid_argument("matrices differ in dimension");
  }
}

double top_norm_sum(std::span<const Hermitian> d, int m) {
  std::vector<double> norms;
  for (const auto& x : d) norms.push_back(op_norm(x));
  std::sort(norms.begin(), norms.end(), std::greater<>{});
  double s = 0.0;
  for (int i = 0; i < m && i < static_cast<int>(norms.size()); ++i) s += norms[static_cast<std::size_t>(i)];
  return s;
}

}  // namespace

void require_hermitian(const Hermitian& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("matrix is not square");
  if (a.rows() > kMaxHermitianDim) throw std::invalid_argument("matrix dimension above 64");
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("matrix is not Hermitian");
  }
}

double lambda_max(const Hermitian& a) {
  const auto ev = eigenvalues(a);
  return ev(ev.size() - 1);
}

double lambda_min(const Hermitian& a) { return eigenvalues(a)(0); }

double op_norm(const Hermitian& a) {
  const auto ev = eigenvalues(a);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

bool psd_leq(const Hermitian& a, const Hermitian& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("dimension mismatch");
  return lambda_min(b - a) >= -tol;
}

Hermitian identity_matrix(int d) { return Hermitian::Identity(d, d); }

Hermitian square(const Hermitian& a) {
  Hermitian s = a * a;
  return 0.5 * (s + s.adjoint());
}

Hermitian abs_matrix(const Hermitian& a) {
  require_hermitian(a);
  Eigen::SelfAdjointEigenSolver<Hermitian> solver(a);
  const Eigen::VectorXd mags = solver.eigenvalues().cwiseAbs();
  Hermitian out = solver.eigenvectors() * mags.cast<std::complex<double>>().asDiagonal() *
                  solver.eigenvectors().adjoint();
  return 0.5 * (out + out.adjoint());
}

Proxy subset_sup(std::span<const Hermitian> d, int m, ProxyMode mode) {
  const int n = static_cast<int>(d.size());
  if (m < 0) throw std::invalid_argument("subset size must be nonnegative");
  m = std::min(m, n);
  if (m == 0 || n == 0) return {0.0, true};
  require_same_dims(d);
  if (mode == ProxyMode::upper || static_cast<double>(binomial(n, m)) > kSubsetGuard) {
    return {top_norm_sum(d, m), false};
  }
  double best = 0.0;
  const auto dim = d.front().rows();
  for_each_subset(n, m, [&](std::span<const int> subset) {
    Hermitian sum = Hermitian::Zero(dim, dim);
    for (int i : subset) sum += d[static_cast<std::size_t>(i)];
    best = std::max(best, op_norm(sum));
  });
  return {best, true};
}

Proxy sigma_thm35(std::span<const Hermitian> c, int k, ProxyMode mode) {
  if (k < 0 || k > static_cast<int>(c.size())) throw std::invalid_argument("k outside [0,n]");
  if (mode == ProxyMode::exact && static_cast<double>(binomial(static_cast<int>(c.size()), k)) > kSubsetGuard) {
    throw std::invalid_argument("exact variance proxy exceeds the subset enumeration guard");
  }
  const auto sq = squares(c);
  Proxy p = subset_sup(sq, k, mode);
  p.value *= 16.0;
  return p;
}

Proxy sigma_rem37(std::span<const Hermitian> c, int k) {
  const int n = static_cast<int>(c.size());
  if (k < 0 || k > n) throw std::invalid_argument("k outside [0,n]");
  const auto sq = squares(c);
  if (!sq.empty()) require_same_dims(sq);
  std::vector<double> norms;
  for (const auto& m : sq) norms.push_back(op_norm(m));
  double total = 0.0;
  for (int m = 0; m <= k; ++m) total += static_cast<double>(binomial(n, m));
  if (total > kSubsetGuard) throw std::invalid_argument("remark proxy exceeds the subset enumeration guard");
  double best = 0.0;
  const auto dim = sq.empty() ? 0 : sq.front().rows();
  for (int m = 0; m <= k; ++m) {
    for_each_subset(n, m, [&](std::span<const int> subset) {
      Hermitian sum = Hermitian::Zero(dim, dim);
      std::vector<bool> in(static_cast<std::size_t>(n), false);
      for (int i : subset) {
        sum += sq[static_cast<std::size_t>(i)];
        in[static_cast<std::size_t>(i)] = true;
      }
      double outside = 0.0;
      for (int i = 0; i < n; ++i) {
        if (!in[static_cast<std::size_t>(i)]) outside = std::max(outside, norms[static_cast<std::size_t>(i)]);
      }
      best = std::max(best, (dim > 0 ? op_norm(sum) : 0.0) + k * outside);
    });
  }
  return {8.0 * best, true};
}

Proxy sigma_prop47(std::span<const Hermitian> c, double R, double delta, double rho) {
  if (!(R > 0.0) || !(delta > 0.0) || !(rho > 0.0)) throw std::invalid_argument("R, Delta and rho must be positive");
  const int m = static_cast<int>(std::ceil(delta / (R * rho) - 1e-12));
  const auto sq = squares(c);
  Proxy p = subset_sup(sq, std::min(m, static_cast<int>(c.size())));
  p.value *= 8.0 * R;
  return p;
}

double thm35_bound(int d, double sigma, double t) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  if (t < 0.0) throw std::invalid_argument("t must be nonnegative");
  return d * std::exp(-t * t / (sigma * sigma + sigma * t));
}

Hermitian matrix_gamma(const Generator<double>& g, std::span<const Hermitian> f, std::size_t x) {
  if (f.size() != g.size()) throw std::invalid_argument("matrix table does not match the support size");
  const auto dim = f[x].rows();
  Hermitian sum = Hermitian::Zero(dim, dim);
  for (std::size_t y = 0; y < g.size(); ++y) {
    if (y == x || g.rate(x, y) == 0.0) continue;
    const Hermitian diff = f[x] - f[y];
    sum += g.rate(x, y) * (diff * diff);
  }
  sum *= 0.5;
  return 0.5 * (sum + sum.adjoint());
}

double aoun_matrix_bound(int d, double c_p, double v_f, double t) {
  if (!(c_p > 0.0) || !(v_f > 0.0)) throw std::invalid_argument("C_P and v_f must be positive");
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  if (t < 0.0) throw std::invalid_argument("t must be nonnegative");
  const double s = 2.0 * c_p * v_f;
  return d * std::exp(-t * t / (s + t * std::sqrt(s)));
}

SubsetLemma km_subset_bound(std::span<const double> t, std::span<const Hermitian> d, double t1, double tinf) {
  if (t.size() != d.size()) throw std::invalid_argument("weights and matrices differ in length");
  if (!(tinf > 0.0)) throw std::invalid_argument("T_inf must be positive");
  double l1 = 0.0;
  double linf = 0.0;
  for (double v : t) {
    if (v < 0.0) throw std::invalid_argument("weights must be nonnegative");
    l1 += v;
    linf = std::max(linf, v);
  }
  if (t1 < l1 * (1.0 - 1e-12) || tinf < linf * (1.0 - 1e-12)) {
    throw std::invalid_argument("T_1 or T_inf below the corresponding norm of t");
  }
  SubsetLemma out;
  if (d.empty()) return out;
  require_same_dims(d);
  const auto dim = d.front().rows();
  Hermitian sum = Hermitian::Zero(dim, dim);
  for (std::size_t i = 0; i < t.size(); ++i) sum += t[i] * d[i];
  out.lhs = op_norm(sum);
  out.subset_size = std::min(static_cast<int>(std::ceil(t1 / tinf - 1e-12)), static_cast<int>(d.size()));
  for (const auto& m : d) {
    if (lambda_min(m) < -1e-12) throw std::invalid_argument("subset lemma needs PSD matrices");
  }
  // PSD summands: the norm grows with the subset, so |I| = m attains the sup over |I| <= m.
  out.rhs = tinf * subset_sup(d, out.subset_size).value;
  return out;
}

Hermitian hermitian_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix JSON must be a nonempty array of rows");
  const auto d = static_cast<Eigen::Index>(j.size());
  Hermitian a(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
      throw std::invalid_argument("matrix JSON row " + std::to_string(r) + " has the wrong length");
    }
    for (Eigen::Index c = 0; c < d; ++c) {
      const auto& e = row[static_cast<std::size_t>(c)];
      if (e.is_number()) {
        a(r, c) = {e.get<double>(), 0.0};
      } else if (e.is_array() && e.size() == 2) {
        a(r, c) = {e[0].get<double>(), e[1].get<double>()};
      } else {
        throw std::invalid_argument("matrix entries must be numbers or [re, im] pairs");
      }
    }
  }
  require_hermitian(a);
  return a;
}

}  // namespace negdep
