#include "negdep/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace negdep {

namespace {

// Bits required and forbidden by the reduced conditioning event.
struct Constraint {
  std::uint64_t care = 0;
  std::uint64_t value = 0;
};

Constraint constraint_of(const PrefixEvent& e) {
  Constraint c;
  for (std::size_t i = 0; i < e.bits.size(); ++i) {
    c.care |= std::uint64_t{1} << i;
    if (e.bits[i]) c.value |= std::uint64_t{1} << i;
  }
  for (int v : e.positions) {
    if (v == kDummyPosition) continue;
    c.care |= std::uint64_t{1} << v;
    c.value |= std::uint64_t{1} << v;
  }
  return c;
}

template <Scalar T>
T event_mass(const DistributionTable<T>& pi, const Constraint& c) {
  T mass = 0;
  for (std::size_t x = 0; x < pi.size(); ++x) {
    if ((pi.support[x].bits() & c.care) == c.value) mass += pi.probs[x];
  }
  return mass;
}

template <Scalar T>
void check_shape(const DistributionTable<T>& pi, const PrefixEvent& e) {
  const int n = pi.dim();
  for (int b : e.bits) {
    if (b != 0 && b != 1) throw std::invalid_argument("revealed bits must be 0 or 1");
  }
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int v : e.positions) {
    if (v == kDummyPosition) continue;
    if (v < 0 || v >= n) throw std::invalid_argument("revealed position out of range");
    if (seen[static_cast<std::size_t>(v)]) throw std::invalid_argument("revealed positions repeat");
    seen[static_cast<std::size_t>(v)] = true;
  }
  switch (e.scheme) {
    case Scheme::F:
      if (!e.positions.empty()) throw std::invalid_argument("scheme F reveals bits only");
      if (static_cast<int>(e.bits.size()) > n) throw std::invalid_argument("prefix longer than n");
      break;
    case Scheme::G: {
      const int k = homogeneity_level(pi);
      if (static_cast<int>(e.bits.size()) > k) throw std::invalid_argument("scheme G reveals only k bits");
      if (!e.positions.empty() && static_cast<int>(e.bits.size()) != k) {
        throw std::invalid_argument("scheme G reveals positions only after k bits");
      }
      if (static_cast<int>(e.positions.size()) > k) throw std::invalid_argument("scheme G has 2k steps");
      int ones = 0;
      for (int b : e.bits) ones += b;
      for (int v : e.positions) {
        if (ones < k) {
          if (v == kDummyPosition || v < k) {
            throw std::invalid_argument("scheme G position must be an unrevealed coordinate >= k");
          }
          ++ones;
        } else if (v != kDummyPosition) {
          throw std::invalid_argument("scheme G reveals the dummy once all ones are known");
        }
      }
      break;
    }
    case Scheme::H: {
      const int k = homogeneity_level(pi);
      if (!e.bits.empty()) throw std::invalid_argument("scheme H reveals positions only");
      if (static_cast<int>(e.positions.size()) > k) throw std::invalid_argument("scheme H has k steps");
      for (int v : e.positions) {
        if (v == kDummyPosition) throw std::invalid_argument("scheme H never reveals the dummy");
      }
      break;
    }
  }
}

template <Scalar T>
std::vector<T> law_given(const DistributionTable<T>& pi, const Constraint& c) {
  const T mass = event_mass(pi, c);
  if (!(mass > T(0))) throw std::invalid_argument("conditioning event has zero probability");
  std::vector<T> w(pi.size(), T(0));
  for (std::size_t x = 0; x < pi.size(); ++x) {
    if ((pi.support[x].bits() & c.care) == c.value) w[x] = pi.probs[x] / mass;
  }
  return w;
}

void require_scheme(const PrefixEvent& e, Scheme s) {
  if (e.scheme != s) throw std::invalid_argument(std::string("expected a scheme ") + scheme_name(s) + " prefix");
}

}  // namespace

PrefixEvent PrefixEvent::parent() const {
  if (step() == 0) throw std::invalid_argument("the empty history has no parent");
  PrefixEvent p = *this;
  if (!p.positions.empty()) {
    p.positions.pop_back();
  } else {
    p.bits.pop_back();
  }
  return p;
}

std::string PrefixEvent::to_string() const {
  std::ostringstream out;
  for (int b : bits) out << b;
  if (!positions.empty()) {
    out << '|';
    for (std::size_t i = 0; i < positions.size(); ++i) {
      if (i) out << ' ';
      // 1-based coordinates, 0 for the dummy.
      out << positions[i] + 1;
    }
  }
  return out.str();
}

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::F: return "F";
    case Scheme::G: return "G";
    case Scheme::H: return "H";
  }
  return "?";
}

template <Scalar T>
int homogeneity_level(const DistributionTable<T>& pi) {
  if (pi.size() == 0) throw std::invalid_argument("empty distribution");
  const int k = pi.support.front().ones();
  for (const auto& x : pi.support) {
    if (x.ones() != k) throw std::invalid_argument("distribution is not homogeneous");
  }
  return k;
}

template <Scalar T>
void validate_prefix(const DistributionTable<T>& pi, const PrefixEvent& e) {
  check_shape(pi, e);
  if (!(event_mass(pi, constraint_of(e)) > T(0))) {
    throw std::invalid_argument("history " + e.to_string() + " has zero probability");
  }
}

template <Scalar T>
std::vector<T> conditional_law(const DistributionTable<T>& pi, const PrefixEvent& e) {
  validate_prefix(pi, e);
  return law_given(pi, constraint_of(e));
}

template <Scalar T>
T prefix_probability(const DistributionTable<T>& pi, const PrefixEvent& e) {
  check_shape(pi, e);
  PrefixEvent partial = e;
  partial.positions.clear();
  T prob = event_mass(pi, constraint_of(partial));
  if (e.positions.empty() || !(prob > T(0))) return prob;
  const int k = homogeneity_level(pi);
  int ones = 0;
  for (int b : e.bits) ones += b;
  for (int v : e.positions) {
    if (v == kDummyPosition) {
      partial.positions.push_back(v);
      continue;
    }
    const T before = event_mass(pi, constraint_of(partial));
    partial.positions.push_back(v);
    const T after = event_mass(pi, constraint_of(partial));
    if (!(after > T(0))) return T(0);
    // P(next revealed one is v | history) = P(X_v = 1 | B) / (number of unrevealed ones).
    prob *= (after / before) / T(k - ones);
    ++ones;
  }
  return prob;
}

template <Scalar T>
T increment(const DistributionTable<T>& pi, std::span<const T> f, const PrefixEvent& e) {
  if (f.size() != pi.size()) throw std::invalid_argument("function table does not match the support");
  validate_prefix(pi, e);
  const auto now = law_given(pi, constraint_of(e));
  const auto before = law_given(pi, constraint_of(e.parent()));
  T sum = 0;
  for (std::size_t x = 0; x < pi.size(); ++x) sum += (now[x] - before[x]) * f[x];
  return sum;
}

Hermitian increment(const DistributionTable<double>& pi, std::span<const Hermitian> f, const PrefixEvent& e) {
  if (f.size() != pi.size()) throw std::invalid_argument("function table does not match the support");
  validate_prefix(pi, e);
  const auto now = law_given(pi, constraint_of(e));
  const auto before = law_given(pi, constraint_of(e.parent()));
  const auto dim = f.front().rows();
  Hermitian sum = Hermitian::Zero(dim, dim);
  for (std::size_t x = 0; x < pi.size(); ++x) {
    const double w = now[x] - before[x];
    if (w != 0.0) sum += w * f[x];
  }
  return sum;
}

template <Scalar T>
T increment_F(const DistributionTable<T>& pi, std::span<const T> f, const PrefixEvent& e) {
  require_scheme(e, Scheme::F);
  return increment(pi, f, e);
}

template <Scalar T>
T increment_G(const DistributionTable<T>& pi, std::span<const T> f, const PrefixEvent& e) {
  require_scheme(e, Scheme::G);
  return increment(pi, f, e);
}

template <Scalar T>
T increment_H(const DistributionTable<T>& pi, std::span<const T> f, const PrefixEvent& e) {
  require_scheme(e, Scheme::H);
  return increment(pi, f, e);
}

int scheme_length(Scheme s, int n, int k) {
  switch (s) {
    case Scheme::F: return n;
    case Scheme::G: return 2 * k;
    case Scheme::H: return k;
  }
  return 0;
}

template <Scalar T>
std::vector<PrefixEvent> enumerate_prefixes(const DistributionTable<T>& pi, Scheme s) {
  const int n = pi.dim();
  const int k = s == Scheme::F ? 0 : homogeneity_level(pi);
  const int length = scheme_length(s, n, k);
  std::vector<PrefixEvent> out;
  std::function<void(const PrefixEvent&)> grow = [&](const PrefixEvent& e) {
    if (e.step() >= length) return;
    std::vector<PrefixEvent> children;
    const bool reveal_bit = s == Scheme::F || (s == Scheme::G && static_cast<int>(e.bits.size()) < k);
    if (reveal_bit) {
      for (int b = 0; b <= 1; ++b) {
        PrefixEvent c = e;
        c.bits.push_back(b);
        children.push_back(std::move(c));
      }
    } else {
      int ones = 0;
      for (int b : e.bits) ones += b;
      for (int v : e.positions) ones += v != kDummyPosition;
      if (s == Scheme::G && ones == k) {
        PrefixEvent c = e;
        c.positions.push_back(kDummyPosition);
        children.push_back(std::move(c));
      } else {
        for (int v = s == Scheme::G ? k : 0; v < n; ++v) {
          if (std::find(e.positions.begin(), e.positions.end(), v) != e.positions.end()) continue;
          PrefixEvent c = e;
          c.positions.push_back(v);
          children.push_back(std::move(c));
        }
      }
    }
    for (auto& c : children) {
      if (!(event_mass(pi, constraint_of(c)) > T(0))) continue;
      out.push_back(c);
      grow(c);
    }
  };
  PrefixEvent root;
  root.scheme = s;
  grow(root);
  return out;
}

std::vector<PrefixEvent> revealing_path(Scheme s, const CubeState& x, int k, std::span<const int> order) {
  std::vector<int> ones;
  if (order.empty()) {
    for (int i = 0; i < x.size(); ++i) {
      if (x[i] && (s != Scheme::G || i >= k)) ones.push_back(i);
    }
  } else {
    ones.assign(order.begin(), order.end());
  }
  std::vector<PrefixEvent> path;
  PrefixEvent e;
  e.scheme = s;
  switch (s) {
    case Scheme::F:
      for (int i = 0; i < x.size(); ++i) {
        e.bits.push_back(x[i]);
        path.push_back(e);
      }
      break;
    case Scheme::G:
      for (int i = 0; i < k; ++i) {
        e.bits.push_back(x[i]);
        path.push_back(e);
      }
      for (int r = 0; r < k; ++r) {
        e.positions.push_back(r < static_cast<int>(ones.size()) ? ones[static_cast<std::size_t>(r)] : kDummyPosition);
        path.push_back(e);
      }
      break;
    case Scheme::H:
      for (int v : ones) {
        e.positions.push_back(v);
        path.push_back(e);
      }
      break;
  }
  return path;
}

double lipschitz_increment_bound(Scheme s, int step, const WeightVector& alpha, int k) {
  if (step < 1 || step > static_cast<int>(alpha.size()) * 2) throw std::invalid_argument("step out of range");
  switch (s) {
    case Scheme::F:
      return 2.0 * alpha[static_cast<std::size_t>(step - 1)];
    case Scheme::G:
      return 2.0 * alpha[static_cast<std::size_t>(std::min(step, k) - 1)];
    case Scheme::H:
      break;
  }
  throw std::invalid_argument("scheme H increments are bounded through the difference matrices");
}

double azuma_bound(std::span<const double> c, double t) {
  if (t < 0.0) throw std::invalid_argument("t must be nonnegative");
  double s = 0.0;
  for (double v : c) {
    if (v < 0.0) throw std::invalid_argument("increment bounds must be nonnegative");
    s += v * v;
  }
  if (t == 0.0) return 1.0;
  if (!(s > 0.0)) throw std::invalid_argument("zero variance proxy with t > 0");
  return std::clamp(std::exp(-t * t / (2.0 * s)), 0.0, 1.0);
}

double azuma_matrix_bound(int d, double sigma2, double t) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  if (t < 0.0) throw std::invalid_argument("t must be nonnegative");
  if (t == 0.0) return d;
  if (!(sigma2 > 0.0)) throw std::invalid_argument("zero variance proxy with t > 0");
  return d * std::exp(-t * t / (8.0 * sigma2));
}

double freedman_matrix_bound(int d, double a, double sigma2, double t) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  if (!(a > 0.0) || !(sigma2 > 0.0)) throw std::invalid_argument("a and sigma2 must be positive");
  if (t < 0.0) throw std::invalid_argument("t must be nonnegative");
  return 2.0 * d * std::exp(-t * t / (2.0 * sigma2 + 2.0 * a * t / 3.0));
}

namespace {

double alpha_denominator(const WeightVector& alpha, std::optional<int> k, double full, double homog) {
  double denom = full * alpha.squared_norm();
  if (k) {
    if (*k < 0) throw std::invalid_argument("k must be nonnegative");
    denom = std::min(denom, homog * alpha.top_squared_sum(static_cast<std::size_t>(*k)));
  }
  return denom;
}

}  // namespace

double thm22_bound(const WeightVector& alpha, double t, std::optional<int> k) {
  if (t < 0.0) throw std::invalid_argument("t must be nonnegative");
  if (t == 0.0) return 1.0;
  if (!(alpha.squared_norm() > 0.0)) throw std::invalid_argument("alpha = 0 with t > 0");
  const double denom = alpha_denominator(alpha, k, 8.0, 16.0);
  if (!(denom > 0.0)) return 0.0;
  return std::clamp(std::exp(-t * t / denom), 0.0, 1.0);
}

double thm23_bound(int d, const WeightVector& alpha, double t, std::optional<int> k) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  if (t < 0.0) throw std::invalid_argument("t must be nonnegative");
  if (t == 0.0) return d;
  if (!(alpha.squared_norm() > 0.0)) throw std::invalid_argument("alpha = 0 with t > 0");
  const double denom = alpha_denominator(alpha, k, 32.0, 64.0);
  if (!(denom > 0.0)) return 0.0;
  return d * std::exp(-t * t / denom);
}

double aoun_bound(int d, int k, double t) {
  if (d < 1 || k < 1) throw std::invalid_argument("d and k must be positive");
  if (t < 0.0) throw std::invalid_argument("t must be nonnegative");
  return d * std::exp(-t * t / (8.0 * k + 2.0 * t * std::sqrt(2.0 * k)));
}

double thm24_bound(int d, double norm_pi_ftilde, double K, int k, double t, bool with_log) {
  if (d < 1 || k < 1) throw std::invalid_argument("d and k must be positive");
  if (!(norm_pi_ftilde > 0.0) || !(K > 0.0)) throw std::invalid_argument("norm and K must be positive");
  if (t < 0.0) throw std::invalid_argument("t must be nonnegative");
  const double logf = with_log ? std::log(std::exp(1.0) * k) : 1.0;
  return d * std::exp(-t * t / (8.0 * norm_pi_ftilde * logf + 4.0 / 3.0 * K * t));
}

Crossover thm23_aoun_crossover(int k, double top_sum) {
  if (k < 1 || !(top_sum > 0.0)) throw std::invalid_argument("k and the weight sum must be positive");
  const double root = std::sqrt(2.0 * k);
  Crossover c;
  c.closed_form = std::max(0.0, (64.0 * top_sum - 8.0 * k) / (2.0 * root));
  // Sign of log(thm23) - log(aoun) for d = 1, which is positive below the threshold.
  auto diff = [&](double t) { return -t * t / (64.0 * top_sum) + t * t / (8.0 * k + 2.0 * t * root); };
  if (c.closed_form == 0.0) return c;
  double lo = 0.0;
  double hi = 1.0;
  while (diff(hi) >= 0.0) hi *= 2.0;
  lo = hi / 2.0;
  while (diff(lo) < 0.0 && lo > 1e-300) lo /= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (diff(mid) >= 0.0 ? lo : hi) = mid;
  }
  c.numeric = 0.5 * (lo + hi);
  return c;
}

#define NEGDEP_INSTANTIATE(T)                                                                      \
  template int homogeneity_level<T>(const DistributionTable<T>&);                                  \
  template void validate_prefix<T>(const DistributionTable<T>&, const PrefixEvent&);               \
  template std::vector<T> conditional_law<T>(const DistributionTable<T>&, const PrefixEvent&);     \
  template T prefix_probability<T>(const DistributionTable<T>&, const PrefixEvent&);               \
  template T increment<T>(const DistributionTable<T>&, std::span<const T>, const PrefixEvent&);    \
  template T increment_F<T>(const DistributionTable<T>&, std::span<const T>, const PrefixEvent&);  \
  template T increment_G<T>(const DistributionTable<T>&, std::span<const T>, const PrefixEvent&);  \
  template T increment_H<T>(const DistributionTable<T>&, std::span<const T>, const PrefixEvent&);  \
  template std::vector<PrefixEvent> enumerate_prefixes<T>(const DistributionTable<T>&, Scheme);

NEGDEP_INSTANTIATE(double)
NEGDEP_INSTANTIATE(Rational)

#undef NEGDEP_INSTANTIATE

}  // namespace negdep
