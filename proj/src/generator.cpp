#include "negdep/generator.hpp"

#include "negdep/coupling.hpp"

#include <json.hpp>

#include <bit>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace negdep {

template <Scalar T>
void Generator<T>::fix_diagonal() {
  const std::size_t m = size();
  for (std::size_t x = 0; x < m; ++x) {
    T sum = 0;
    for (std::size_t y = 0; y < m; ++y) {
      if (y != x) sum += rate(x, y);
    }
    rate(x, x) = -sum;
  }
}

namespace {

template <Scalar T>
Generator<T> empty_generator(int n, std::vector<CubeState> support, std::vector<T> stationary) {
  Generator<T> g;
  g.n = n;
  g.support = std::move(support);
  g.stationary = std::move(stationary);
  g.rates.assign(g.support.size() * g.support.size(), T(0));
  g.index = StateIndex(g.support);
  return g;
}

// Recursive construction over coordinate subsets of the original vector p.
// Subproblems are keyed by (coordinate mask, level); a subproblem's states use
// the mask's coordinates in increasing order, so dropping local coordinate l
// from a state matches dropping the corresponding original coordinate.
template <Scalar T>
class HermonSalezBuilder {
 public:
  explicit HermonSalezBuilder(std::span<const T> p) : p_(p.begin(), p.end()) {
    const int n = static_cast<int>(p_.size());
    const int guard = is_exact_v<T> ? kMaxRecursionDimExact : kMaxRecursionDimFloat;
    if (n > guard) {
      throw std::invalid_argument("recursive generator limited to n <= " + std::to_string(guard) +
                                  (is_exact_v<T> ? " in exact arithmetic" : " in floating point"));
    }
    if (n < 1) throw std::invalid_argument("recursive generator needs n >= 1");
  }

  std::uint64_t full_mask() const { return (std::uint64_t{1} << p_.size()) - 1; }

  const Generator<T>& build(std::uint64_t mask, int k) {
    const auto key = std::make_pair(mask, k);
    if (auto it = memo_.find(key); it != memo_.end()) return *it->second;
    auto g = std::make_unique<Generator<T>>(assemble(mask, k, -1));
    const auto& ref = *g;
    memo_.emplace(key, std::move(g));
    return ref;
  }

  // component < 0: the average over all l; otherwise only L^(component).
  Generator<T> assemble(std::uint64_t mask, int k, int component) {
    const int m = std::popcount(mask);
    const std::vector<T> p = restrict(mask);
    const CondBernoulliSpec<T> spec(p, k);
    const auto table = to_table(spec);
    Generator<T> g = empty_generator<T>(m, table.support, table.probs);
    if (g.size() <= 1) return g;

    // Marginals P(X_l = 1) straight from the table.
    std::vector<T> incl(static_cast<std::size_t>(m), T(0));
    for (std::size_t a = 0; a < g.size(); ++a) {
      for (int l = 0; l < m; ++l) {
        if (g.support[a][l]) incl[static_cast<std::size_t>(l)] += g.stationary[a];
      }
    }

    const T weight = component < 0 ? T(T(1) / T(m)) : T(1);
    for (int l = 0; l < m; ++l) {
      if (component >= 0 && l != component) continue;
      const std::uint64_t sub = mask & ~(std::uint64_t{1} << nth_set_bit(mask, l));
      const Generator<T>* level0 = k <= m - 1 ? &build(sub, k) : nullptr;
      const Generator<T>* level1 = k >= 1 ? &build(sub, k - 1) : nullptr;
      const bool crosses = k >= 1 && k <= m - 1;
      const CouplingKernel<T>* up = crosses ? &kernel(up_kernels_, sub, k, CouplingDirection::up) : nullptr;
      const CouplingKernel<T>* down =
          crosses ? &kernel(down_kernels_, sub, k, CouplingDirection::down) : nullptr;
      const T p_one = incl[static_cast<std::size_t>(l)];
      const T p_zero = T(1) - p_one;

      for (std::size_t a = 0; a < g.size(); ++a) {
        const CubeState& x = g.support[a];
        const bool xl = x[l];
        const CubeState rest = remove_coordinate(x, l);

        // Same value at l: the conditioned generator on the other coordinates.
        const Generator<T>& same = xl ? *level1 : *level0;
        const std::size_t ia = same.index.at(rest);
        for (std::size_t b = 0; b < same.size(); ++b) {
          if (b == ia) continue;
          const T& r = same.rate(ia, b);
          if (r == T(0)) continue;
          const std::size_t target = g.index.at(insert_coordinate(same.support[b], l, xl));
          g.rate(a, target) += weight * r;
        }

        // Value at l changes: the coupling kernel between the two conditioned laws.
        if (!crosses) continue;
        const CouplingKernel<T>& kern = xl ? *up : *down;
        const T& flip_prob = xl ? p_zero : p_one;
        for (const auto& tr : kern.rows[kern.source_index.at(rest)]) {
          const std::size_t target = g.index.at(insert_coordinate(kern.targets[tr.target], l, !xl));
          g.rate(a, target) += weight * tr.prob * flip_prob;
        }
      }
    }
    g.fix_diagonal();
    return g;
  }

 private:
  using KernelMemo = std::map<std::pair<std::uint64_t, int>, std::unique_ptr<CouplingKernel<T>>>;

  static int nth_set_bit(std::uint64_t mask, int l) {
    for (int i = 0; i < l; ++i) mask &= mask - 1;
    return std::countr_zero(mask);
  }

  std::vector<T> restrict(std::uint64_t mask) const {
    std::vector<T> out;
    for (std::size_t i = 0; i < p_.size(); ++i) {
      if ((mask >> i) & 1U) out.push_back(p_[i]);
    }
    return out;
  }

  const CouplingKernel<T>& kernel(KernelMemo& memo, std::uint64_t mask, int k, CouplingDirection dir) {
    const auto key = std::make_pair(mask, k);
    if (auto it = memo.find(key); it != memo.end()) return *it->second;
    const std::vector<T> p = restrict(mask);
    auto kern = std::make_unique<CouplingKernel<T>>(dir == CouplingDirection::up ? up_kernel<T>(p, k)
                                                                                   : down_kernel<T>(p, k));
    const auto& ref = *kern;
    memo.emplace(key, std::move(kern));
    return ref;
  }

  std::vector<T> p_;
  std::map<std::pair<std::uint64_t, int>, std::unique_ptr<Generator<T>>> memo_;
  KernelMemo up_kernels_;
  KernelMemo down_kernels_;
};

}  // namespace

template <Scalar T>
Generator<T> build_hermon_salez(std::span<const T> p, int k) {
  HermonSalezBuilder<T> builder(p);
  if (k < 0 || k > static_cast<int>(p.size())) throw std::invalid_argument("k outside [0,n]");
  return builder.assemble(builder.full_mask(), k, -1);
}

template <Scalar T>
Generator<T> hermon_salez_component(std::span<const T> p, int k, int l) {
  HermonSalezBuilder<T> builder(p);
  if (k < 0 || k > static_cast<int>(p.size())) throw std::invalid_argument("k outside [0,n]");
  if (l < 0 || l >= static_cast<int>(p.size())) throw std::out_of_range("component index out of range");
  return builder.assemble(builder.full_mask(), k, l);
}

template <Scalar T>
Generator<T> build_bernoulli_laplace(int n, int k) {
  if (n < 1) throw std::invalid_argument("Bernoulli-Laplace model needs n >= 1");
  auto support = enumerate_slice(n, k);
  const T mass = T(1) / T(static_cast<long long>(support.size()));
  std::vector<T> stationary(support.size(), mass);
  Generator<T> g = empty_generator<T>(n, std::move(support), std::move(stationary));
  const T rate = T(1) / T(n);
  for (std::size_t a = 0; a < g.size(); ++a) {
    const CubeState& x = g.support[a];
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (x[i] == x[j]) continue;
        g.rate(a, g.index.at(swap(x, i, j))) = rate;
      }
    }
  }
  g.fix_diagonal();
  return g;
}

template <Scalar T>
Generator<T> build_glauber_uniform(int n) {
  if (n < 1) throw std::invalid_argument("Glauber dynamics needs n >= 1");
  if ((std::size_t{1} << n) > kMaxGeneratorStates) {
    throw std::invalid_argument("cube too large for a dense generator");
  }
  auto support = enumerate_cube(n);
  const T mass = T(1) / T(static_cast<long long>(support.size()));
  std::vector<T> stationary(support.size(), mass);
  Generator<T> g = empty_generator<T>(n, std::move(support), std::move(stationary));
  for (std::size_t a = 0; a < g.size(); ++a) {
    for (int i = 0; i < n; ++i) g.rate(a, g.index.at(flip(g.support[a], i))) = 1;
  }
  g.fix_diagonal();
  return g;
}

template <Scalar T>
Generator<T> tensorize(std::span<const Generator<T>> gens) {
  if (gens.empty()) throw std::invalid_argument("tensorize needs at least one generator");
  if (gens.size() == 1) return gens.front();
  std::size_t states = 1;
  int n = 0;
  for (const auto& g : gens) {
    if (g.size() == 0) throw std::invalid_argument("tensor factor has empty support");
    states *= g.size();
    n += g.n;
    if (states > kMaxGeneratorStates) throw std::invalid_argument("tensor product support too large");
  }
  if (n > kMaxCubeDim) throw std::invalid_argument("tensor product exceeds 63 coordinates");

  // Mixed-radix enumeration, first factor varying slowest.
  const std::size_t m = gens.size();
  std::vector<std::vector<std::size_t>> digits;
  std::vector<CubeState> support;
  std::vector<T> stationary;
  std::vector<std::size_t> idx(m, 0);
  for (std::size_t s = 0; s < states; ++s) {
    CubeState state(0);
    T prob = 1;
    for (std::size_t f = 0; f < m; ++f) {
      state = concat(state, gens[f].support[idx[f]]);
      prob *= gens[f].stationary[idx[f]];
    }
    support.push_back(state);
    stationary.push_back(prob);
    digits.push_back(idx);
    for (std::size_t f = m; f-- > 0;) {
      if (++idx[f] < gens[f].size()) break;
      idx[f] = 0;
    }
  }
  Generator<T> g = empty_generator<T>(n, std::move(support), std::move(stationary));
  std::vector<std::size_t> stride(m, 1);
  for (std::size_t f = m - 1; f-- > 0;) stride[f] = stride[f + 1] * gens[f + 1].size();
  for (std::size_t a = 0; a < states; ++a) {
    for (std::size_t f = 0; f < m; ++f) {
      const std::size_t own = digits[a][f];
      for (std::size_t b = 0; b < gens[f].size(); ++b) {
        if (b == own) continue;
        const T& r = gens[f].rate(own, b);
        if (r == T(0)) continue;
        const std::size_t target = a + (b - own) * stride[f];  // unsigned wrap cancels
        g.rate(a, target) += r;
      }
    }
  }
  g.fix_diagonal();
  return g;
}

template <Scalar T>
Generator<T> scaled(const Generator<T>& g, const T& factor) {
  if (!(factor > T(0))) throw std::invalid_argument("time change factor must be positive");
  Generator<T> out = g;
  for (auto& r : out.rates) r *= factor;
  return out;
}

Generator<double> to_float(const Generator<Rational>& g) {
  Generator<double> out;
  out.n = g.n;
  out.support = g.support;
  out.index = g.index;
  for (const auto& q : g.stationary) out.stationary.push_back(to_double(q));
  out.rates.reserve(g.rates.size());
  for (const auto& r : g.rates) out.rates.push_back(to_double(r));
  return out;
}

template <Scalar T>
T check_detailed_balance(const Generator<T>& g) {
  T worst = 0;
  for (std::size_t x = 0; x < g.size(); ++x) {
    for (std::size_t y = x + 1; y < g.size(); ++y) {
      const T v = abs_value<T>(T(g.stationary[x] * g.rate(x, y) - g.stationary[y] * g.rate(y, x)));
      if (v > worst) worst = v;
    }
  }
  return worst;
}

template <Scalar T>
bool check_flip_swap(const Generator<T>& g) {
  for (std::size_t x = 0; x < g.size(); ++x) {
    for (std::size_t y = 0; y < g.size(); ++y) {
      if (x == y || !(g.rate(x, y) > T(0))) continue;
      const int d = hamming(g.support[x], g.support[y]);
      const bool is_flip = d == 1;
      const bool is_swap = d == 2 && kappa(g.support[x]) == kappa(g.support[y]);
      if (!is_flip && !is_swap) return false;
    }
  }
  return true;
}

template <Scalar T>
RowAudit<T> audit_rows(const Generator<T>& g) {
  RowAudit<T> audit{T(0), T(0)};
  for (std::size_t x = 0; x < g.size(); ++x) {
    T sum = 0;
    for (std::size_t y = 0; y < g.size(); ++y) {
      sum += g.rate(x, y);
      if (x != y && g.rate(x, y) < T(0) && T(-g.rate(x, y)) > audit.max_negative_rate) {
        audit.max_negative_rate = -g.rate(x, y);
      }
    }
    const T a = abs_value<T>(sum);
    if (a > audit.max_row_sum) audit.max_row_sum = a;
  }
  return audit;
}

template <Scalar T>
T delta(const Generator<T>& g) {
  T worst = 0;
  for (std::size_t x = 0; x < g.size(); ++x) {
    const T exit = -g.rate(x, x);
    if (exit > worst) worst = exit;
  }
  return worst;
}

template <Scalar T>
T stability_functional(const Generator<T>& g) {
  T worst = 0;
  std::vector<T> per_coord(static_cast<std::size_t>(g.n));
  for (std::size_t x = 0; x < g.size(); ++x) {
    if (!(g.stationary[x] > T(0))) continue;
    for (auto& v : per_coord) v = 0;
    for (std::size_t y = 0; y < g.size(); ++y) {
      if (y == x) continue;
      const T& r = g.rate(x, y);
      if (r == T(0)) continue;
      std::uint64_t diff = g.support[x].bits() ^ g.support[y].bits();
      while (diff != 0) {
        per_coord[static_cast<std::size_t>(std::countr_zero(diff))] += r;
        diff &= diff - 1;
      }
    }
    for (const auto& v : per_coord) {
      if (v > worst) worst = v;
    }
  }
  return worst;
}

template <Scalar T>
double stability_constant(const Generator<T>& g, double rho_lower) {
  if (!(rho_lower > 0.0)) throw std::invalid_argument("rho lower bound must be positive");
  return to_double(stability_functional(g)) / rho_lower;
}

std::string generator_header_json(const Generator<double>& g, int k, std::span<const double> p) {
  nlohmann::json j;
  j["n"] = g.n;
  if (k >= 0) j["k"] = k;
  if (!p.empty()) j["p"] = std::vector<double>(p.begin(), p.end());
  j["support_size"] = g.size();
  return j.dump();
}

std::string generator_rates_csv(const Generator<double>& g) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "source,target,rate\n";
  for (std::size_t x = 0; x < g.size(); ++x) {
    for (std::size_t y = 0; y < g.size(); ++y) {
      if (x == y || g.rate(x, y) == 0.0) continue;
      out << g.support[x].to_string() << ',' << g.support[y].to_string() << ',' << g.rate(x, y) << '\n';
    }
  }
  return out.str();
}

#define NEGDEP_INSTANTIATE(T)                                                         \
  template struct Generator<T>;                                                       \
  template Generator<T> build_hermon_salez<T>(std::span<const T>, int);               \
  template Generator<T> hermon_salez_component<T>(std::span<const T>, int, int);      \
  template Generator<T> build_bernoulli_laplace<T>(int, int);                         \
  template Generator<T> build_glauber_uniform<T>(int);                                \
  template Generator<T> tensorize<T>(std::span<const Generator<T>>);                  \
  template Generator<T> scaled<T>(const Generator<T>&, const T&);                     \
  template T check_detailed_balance<T>(const Generator<T>&);                          \
  template bool check_flip_swap<T>(const Generator<T>&);                              \
  template RowAudit<T> audit_rows<T>(const Generator<T>&);                            \
  template T delta<T>(const Generator<T>&);                                           \
  template T stability_functional<T>(const Generator<T>&);                            \
  template double stability_constant<T>(const Generator<T>&, double);

NEGDEP_INSTANTIATE(double)
NEGDEP_INSTANTIATE(Rational)

#undef NEGDEP_INSTANTIATE

}  // namespace negdep
