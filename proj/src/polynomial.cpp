#include "negdep/polynomial.hpp"

#include "negdep/random.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace negdep {

TetrahedralPolynomial::TetrahedralPolynomial(int n, std::map<std::uint64_t, double> coeffs) : n_(n) {
  if (n < 0 || n > kMaxCubeDim) throw std::invalid_argument("dimension outside [0,63]");
  for (const auto& [s, c] : coeffs) set(s, c);
}

int TetrahedralPolynomial::degree() const {
  int d = 0;
  for (const auto& [s, c] : coeffs_) d = std::max(d, std::popcount(s));
  return d;
}

double TetrahedralPolynomial::coeff(std::uint64_t subset) const {
  const auto it = coeffs_.find(subset);
  return it == coeffs_.end() ? 0.0 : it->second;
}

void TetrahedralPolynomial::set(std::uint64_t subset, double value) {
  if (n_ < 64 && (subset >> n_) != 0) throw std::invalid_argument("subset outside the coordinates");
  if (value == 0.0) {
    coeffs_.erase(subset);
  } else {
    coeffs_[subset] = value;
  }
}

double TetrahedralPolynomial::evaluate(const CubeState& x) const {
  if (x.size() != n_) throw std::invalid_argument("state length differs from the polynomial dimension");
  double v = 0.0;
  for (const auto& [s, c] : coeffs_) {
    if ((s & ~x.bits()) == 0) v += c;
  }
  return v;
}

double TetrahedralPolynomial::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) throw std::invalid_argument("point length differs from the polynomial dimension");
  double v = 0.0;
  for (const auto& [s, c] : coeffs_) {
    double term = c;
    for (auto m = s; m; m &= m - 1) term *= x[static_cast<std::size_t>(std::countr_zero(m))];
    v += term;
  }
  return v;
}

TetrahedralPolynomial walsh_transform(int n, std::span<const double> f) {
  if (n < 0 || n > kMaxWalshDim) throw std::invalid_argument("Walsh transform supports n <= 20");
  const std::size_t size = std::size_t{1} << n;
  if (f.size() != size) throw std::invalid_argument("table must cover the whole cube");
  std::vector<double> a(f.begin(), f.end());
  for (int i = 0; i < n; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t m = 0; m < size; ++m) {
      if (m & bit) a[m] -= a[m ^ bit];
    }
  }
  TetrahedralPolynomial p(n);
  for (std::size_t m = 0; m < size; ++m) p.set(m, a[m]);
  return p;
}

IndexTensor::IndexTensor(int order, int n) : order_(order), n_(n) {
  if (order < 0 || n < 1) throw std::invalid_argument("tensor order must be >= 0 and n >= 1");
  const double entries = std::pow(static_cast<double>(n), order);
  if (entries > 1e7) throw std::invalid_argument("tensor too large");
  data_.assign(static_cast<std::size_t>(entries), 0.0);
}

std::size_t IndexTensor::offset(std::span<const int> idx) const {
  if (static_cast<int>(idx.size()) != order_) throw std::invalid_argument("index length differs from the order");
  std::size_t off = 0;
  std::size_t stride = 1;
  for (int i : idx) {
    if (i < 0 || i >= n_) throw std::out_of_range("tensor index out of range");
    off += static_cast<std::size_t>(i) * stride;
    stride *= static_cast<std::size_t>(n_);
  }
  return off;
}

double IndexTensor::frobenius() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

namespace {

// Adds c at every ordering of the index set `set`.
void add_symmetric(IndexTensor& t, std::uint64_t set, double c) {
  std::vector<int> idx;
  for (auto m = set; m; m &= m - 1) idx.push_back(std::countr_zero(m));
  do {
    t.at(idx) += c;
  } while (std::next_permutation(idx.begin(), idx.end()));
}

template <typename Weight>
IndexTensor derivative_with(const TetrahedralPolynomial& f, int r, Weight weight_of_rest) {
  if (r < 1) throw std::invalid_argument("derivative order must be >= 1");
  IndexTensor t(r, std::max(1, f.n()));
  for (const auto& [s, c] : f.coeffs()) {
    if (std::popcount(s) < r) continue;
    // Every r-subset I of S contributes c times the product over S \ I.
    for (auto sub = s;; sub = (sub - 1) & s) {
      if (std::popcount(sub) == r) {
        const double w = weight_of_rest(s & ~sub);
        if (w != 0.0) add_symmetric(t, sub, c * w);
      }
      if (sub == 0) break;
    }
  }
  return t;
}

}  // namespace

IndexTensor derivative_tensor(const TetrahedralPolynomial& f, int r, const CubeState& x) {
  if (x.size() != f.n()) throw std::invalid_argument("state length differs from the polynomial dimension");
  return derivative_with(f, r, [&](std::uint64_t rest) { return (rest & ~x.bits()) == 0 ? 1.0 : 0.0; });
}

IndexTensor mean_derivative(const DistributionTable<double>& pi, const TetrahedralPolynomial& f, int r) {
  if (pi.dim() != f.n()) throw std::invalid_argument("distribution and polynomial dimensions differ");
  return derivative_with(f, r, [&](std::uint64_t rest) {
    double w = 0.0;
    for (std::size_t x = 0; x < pi.size(); ++x) {
      if ((rest & ~pi.support[x].bits()) == 0) w += pi.probs[x];
    }
    return w;
  });
}

std::vector<Partition> partitions(int r) {
  if (r < 1 || r > kMaxPartitionOrder) throw std::invalid_argument("partitions supported for 1 <= r <= 6");
  std::vector<Partition> out;
  // Restricted growth strings: a[0] = 0, a[i] <= 1 + max(a[0..i-1]).
  std::vector<int> a(static_cast<std::size_t>(r), 0);
  for (;;) {
    const int blocks = *std::max_element(a.begin(), a.end()) + 1;
    Partition p(static_cast<std::size_t>(blocks));
    for (int i = 0; i < r; ++i) p[static_cast<std::size_t>(a[static_cast<std::size_t>(i)])].push_back(i);
    out.push_back(std::move(p));
    int i = r - 1;
    for (; i > 0; --i) {
      const int prefix_max = *std::max_element(a.begin(), a.begin() + i);
      if (a[static_cast<std::size_t>(i)] <= prefix_max) break;
    }
    if (i == 0) break;
    ++a[static_cast<std::size_t>(i)];
    std::fill(a.begin() + i + 1, a.end(), 0);
  }
  return out;
}

std::string partition_to_string(const Partition& p) {
  std::ostringstream out;
  for (const auto& block : p) {
    out << '{';
    for (std::size_t i = 0; i < block.size(); ++i) {
      if (i) out << ',';
      out << block[i] + 1;
    }
    out << '}';
  }
  return out.str();
}

namespace {

struct BlockLayout {
  std::vector<std::size_t> dims;              // n^{|block|}
  std::vector<std::vector<std::uint32_t>> sub;  // sub[b][offset]
};

BlockLayout layout(const IndexTensor& a, const Partition& j) {
  const int r = a.order();
  std::vector<int> owner(static_cast<std::size_t>(r), -1);
  for (std::size_t b = 0; b < j.size(); ++b) {
    if (j[b].empty()) throw std::invalid_argument("partition has an empty block");
    for (int pos : j[b]) {
      if (pos < 0 || pos >= r || owner[static_cast<std::size_t>(pos)] != -1) {
        throw std::invalid_argument("partition does not match the tensor order");
      }
      owner[static_cast<std::size_t>(pos)] = static_cast<int>(b);
    }
  }
  if (std::find(owner.begin(), owner.end(), -1) != owner.end()) {
    throw std::invalid_argument("partition does not cover every tensor position");
  }
  const auto n = static_cast<std::size_t>(a.n());
  BlockLayout l;
  for (const auto& block : j) {
    std::size_t d = 1;
    for (std::size_t i = 0; i < block.size(); ++i) d *= n;
    l.dims.push_back(d);
  }
  l.sub.assign(j.size(), std::vector<std::uint32_t>(a.size(), 0));
  std::vector<int> idx(static_cast<std::size_t>(r), 0);
  for (std::size_t off = 0; off < a.size(); ++off) {
    for (std::size_t b = 0; b < j.size(); ++b) {
      std::size_t s = 0;
      std::size_t stride = 1;
      for (int pos : j[b]) {
        s += static_cast<std::size_t>(idx[static_cast<std::size_t>(pos)]) * stride;
        stride *= n;
      }
      l.sub[b][off] = static_cast<std::uint32_t>(s);
    }
    for (int p = 0; p < r; ++p) {
      if (++idx[static_cast<std::size_t>(p)] < a.n()) break;
      idx[static_cast<std::size_t>(p)] = 0;
    }
  }
  return l;
}

double form_value(const IndexTensor& a, const BlockLayout& l, const std::vector<std::vector<double>>& x) {
  double v = 0.0;
  for (std::size_t off = 0; off < a.size(); ++off) {
    const double e = a.data()[off];
    if (e == 0.0) continue;
    double term = e;
    for (std::size_t b = 0; b < x.size(); ++b) term *= x[b][l.sub[b][off]];
    v += term;
  }
  return v;
}

Eigen::MatrixXd matricize(const IndexTensor& a, const BlockLayout& l) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(l.dims[0]), static_cast<Eigen::Index>(l.dims[1]));
  for (std::size_t off = 0; off < a.size(); ++off) {
    m(l.sub[0][off], l.sub[1][off]) += a.data()[off];
  }
  return m;
}

double top_singular_value(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

double normalize(std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  s = std::sqrt(s);
  if (s > 0.0) {
    for (double& e : v) e /= s;
  }
  return s;
}

double alternating(const IndexTensor& a, const BlockLayout& l, const NormOptions& o) {
  const std::size_t blocks = l.dims.size();
  double best = 0.0;
  std::normal_distribution<double> gauss;
  for (int restart = 0; restart < o.restarts; ++restart) {
    RandomStream rng(RandomStream::derive(o.seed, static_cast<std::uint64_t>(restart)));
    std::vector<std::vector<double>> x(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
      x[b].resize(l.dims[b]);
      for (double& e : x[b]) e = gauss(rng);
      normalize(x[b]);
    }
    double value = std::abs(form_value(a, l, x));
    for (int sweep = 0; sweep < o.max_sweeps; ++sweep) {
      double g_norm = 0.0;
      for (std::size_t target = 0; target < blocks; ++target) {
        std::vector<double> g(l.dims[target], 0.0);
        for (std::size_t off = 0; off < a.size(); ++off) {
          const double e = a.data()[off];
          if (e == 0.0) continue;
          double term = e;
          for (std::size_t b = 0; b < blocks; ++b) {
            if (b != target) term *= x[b][l.sub[b][off]];
          }
          g[l.sub[target][off]] += term;
        }
        g_norm = normalize(g);
        if (g_norm == 0.0) break;
        x[target] = std::move(g);
      }
      const double next = g_norm;
      const bool done = std::abs(next - value) <= o.tol * std::max(1.0, next);
      value = std::max(value, next);
      if (done || next == 0.0) break;
    }
    best = std::max(best, value);
  }
  return best;
}

// Grid over the sphere of the first block (dimension <= 4), with the remaining
// pair of blocks solved exactly by SVD.
double grid_check(const IndexTensor& a, const BlockLayout& l) {
  const auto dim = static_cast<int>(l.dims[0]);
  const int g = dim <= 3 ? 8 : 5;
  double best = 0.0;
  std::vector<int> c(static_cast<std::size_t>(dim), -g);
  for (;;) {
    std::vector<double> v(c.begin(), c.end());
    if (normalize(v) > 0.0) {
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(l.dims[1]), static_cast<Eigen::Index>(l.dims[2]));
      for (std::size_t off = 0; off < a.size(); ++off) {
        m(l.sub[1][off], l.sub[2][off]) += a.data()[off] * v[l.sub[0][off]];
      }
      best = std::max(best, top_singular_value(m));
    }
    int i = 0;
    for (; i < dim; ++i) {
      if (++c[static_cast<std::size_t>(i)] <= g) break;
      c[static_cast<std::size_t>(i)] = -g;
    }
    if (i == dim) break;
  }
  return best;
}

}  // namespace

double multilinear_form(const IndexTensor& a, const Partition& j, std::span<const std::vector<double>> vectors) {
  const auto l = layout(a, j);
  if (vectors.size() != j.size()) throw std::invalid_argument("one vector per block is required");
  for (std::size_t b = 0; b < j.size(); ++b) {
    if (vectors[b].size() != l.dims[b]) throw std::invalid_argument("block vector has the wrong length");
  }
  return form_value(a, l, std::vector<std::vector<double>>(vectors.begin(), vectors.end()));
}

NormResult injective_norm(const IndexTensor& a, const Partition& j, const NormOptions& options) {
  if (a.order() < 1) throw std::invalid_argument("tensor order must be >= 1");
  const auto l = layout(a, j);
  NormResult out;
  if (j.size() == 1) {
    out.value = a.frobenius();
    out.method = "closed-form";
    out.exact = true;
    return out;
  }
  if (j.size() == 2) {
    out.value = top_singular_value(matricize(a, l));
    out.method = "closed-form";
    out.exact = true;
    return out;
  }
  out.value = alternating(a, l, options);
  out.method = "alternating";
  if (options.mode == NormMode::certified && j.size() == 3 && l.dims[0] <= 4) {
    const double grid = grid_check(a, l);
    if (grid > out.value * (1.0 + 1e-6) + 1e-12) {
      throw std::runtime_error("alternating maximization fell below the grid value for " + partition_to_string(j));
    }
    out.value = std::max(out.value, grid);
    out.method = "grid-checked";
  }
  return out;
}

std::vector<PolyTailTerm> polynomial_norms(const DistributionTable<double>& pi, const TetrahedralPolynomial& f,
                                           const NormOptions& options) {
  std::vector<PolyTailTerm> out;
  const int d = f.degree();
  if (d > kMaxPartitionOrder) throw std::invalid_argument("degree above the partition guard");
  for (int r = 1; r <= d; ++r) {
    const auto tensor = mean_derivative(pi, f, r);
    for (const auto& j : partitions(r)) {
      const auto norm = injective_norm(tensor, j, options);
      if (!(norm.value > 0.0)) continue;
      out.push_back({r, j, norm.value, norm.method});
    }
  }
  return out;
}

PolyTailBound thm38_bound(std::span<const PolyTailTerm> norms, double t, double R, double cd) {
  if (t < 0.0) throw std::invalid_argument("t must be nonnegative");
  if (!(R > 0.0) || !(cd > 0.0)) throw std::invalid_argument("R and Cd must be positive");
  PolyTailBound out;
  if (t == 0.0) return out;
  if (norms.empty()) throw std::invalid_argument("all derivative norms vanish (constant polynomial)");
  out.exponent = std::numeric_limits<double>::infinity();
  for (const auto& term : norms) {
    const double scale = std::pow(R, term.r / 2.0) * term.norm;
    const double e = std::pow(t / scale, 2.0 / static_cast<double>(term.partition.size()));
    if (e < out.exponent) {
      out.exponent = e;
      out.r = term.r;
      out.partition = term.partition;
    }
  }
  out.bound = 2.0 * std::exp(-out.exponent / cd);
  return out;
}

double thm38_exponent(const DistributionTable<double>& pi, const TetrahedralPolynomial& f, double t, double R,
                      double cd) {
  if (t == 0.0) return 2.0;
  const auto norms = polynomial_norms(pi, f);
  return thm38_bound(norms, t, R, cd).bound;
}

double required_cd(double exponent, double tail) {
  if (exponent < 0.0 || tail < 0.0) throw std::invalid_argument("exponent and tail must be nonnegative");
  if (tail == 0.0 || exponent == 0.0) return 0.0;
  if (tail >= 2.0) return std::numeric_limits<double>::infinity();
  return exponent / std::log(2.0 / tail);
}

}  // namespace negdep
