#include "negdep/cond_bernoulli.hpp"

#include <json.hpp>

#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace negdep {

template <Scalar T>
std::ptrdiff_t DistributionTable<T>::index_of(const CubeState& x) const {
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] == x) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

template <Scalar T>
T DistributionTable<T>::total() const {
  T s = 0;
  for (const auto& q : probs) s += q;
  return s;
}

template <Scalar T>
CondBernoulliSpec<T>::CondBernoulliSpec(std::vector<T> p, int k) : p_(std::move(p)), k_(k) {
  const int n = static_cast<int>(p_.size());
  if (n > kMaxCubeDim) throw std::invalid_argument("at most 63 coordinates are supported");
  if (k < 0 || k > n) {
    throw std::invalid_argument("k=" + std::to_string(k) + " outside [0," + std::to_string(n) + "]");
  }
  for (const auto& q : p_) {
    if (!(q > T(0) && q < T(1))) {
      throw std::invalid_argument("success probabilities must lie strictly inside (0,1)");
    }
  }
  const int width = n + 2;
  suffix_.assign(static_cast<std::size_t>((n + 1) * width), T(0));
  suffix_[static_cast<std::size_t>(n * width)] = 1;
  for (int j = n - 1; j >= 0; --j) {
    const T& q = p_[static_cast<std::size_t>(j)];
    const T one_minus = T(1) - q;
    for (int m = 0; m <= n - j; ++m) {
      T v = one_minus * suffix_[static_cast<std::size_t>((j + 1) * width + m)];
      if (m > 0) v += q * suffix_[static_cast<std::size_t>((j + 1) * width + m - 1)];
      suffix_[static_cast<std::size_t>(j * width + m)] = v;
    }
  }
}

template <Scalar T>
const T& CondBernoulliSpec<T>::suffix(int j, int m) const {
  static const T zero = 0;
  const int n = this->n();
  if (j < 0 || j > n || m < 0 || m > n) return zero;
  return suffix_[static_cast<std::size_t>(j * (n + 2) + m)];
}

template <Scalar T>
T poisson_binomial(std::span<const T> p, int m) {
  const int n = static_cast<int>(p.size());
  if (m < 0 || m > n) {
    throw std::invalid_argument("count m=" + std::to_string(m) + " outside [0," + std::to_string(n) + "]");
  }
  std::vector<T> dist(static_cast<std::size_t>(n + 1), T(0));
  dist[0] = 1;
  for (int i = 0; i < n; ++i) {
    const T& q = p[static_cast<std::size_t>(i)];
    for (int c = i + 1; c >= 1; --c) {
      dist[static_cast<std::size_t>(c)] =
          dist[static_cast<std::size_t>(c)] * (T(1) - q) + dist[static_cast<std::size_t>(c - 1)] * q;
    }
    dist[0] *= T(1) - q;
  }
  return dist[static_cast<std::size_t>(m)];
}

template <Scalar T>
T pmf(const CondBernoulliSpec<T>& spec, const CubeState& x) {
  if (x.size() != spec.n()) throw std::invalid_argument("state length does not match the spec");
  if (kappa(x) != spec.k()) return T(0);
  T w = 1;
  for (int i = 0; i < spec.n(); ++i) {
    const T& q = spec.p()[static_cast<std::size_t>(i)];
    w *= x[i] ? q : T(T(1) - q);
  }
  return T(w / spec.normalizer());
}

CubeState sample(const CondBernoulli& spec, RandomStream& rng) {
  const int n = spec.n();
  int remaining = spec.k();
  std::uint64_t bits = 0;
  for (int i = 0; i < n && remaining > 0; ++i) {
    if (n - i == remaining) {
      for (int j = i; j < n; ++j) bits |= std::uint64_t{1} << j;
      break;
    }
    const double q = spec.p()[static_cast<std::size_t>(i)];
    const double take = q * spec.suffix(i + 1, remaining - 1);
    const double skip = (1.0 - q) * spec.suffix(i + 1, remaining);
    if (rng.uniform() * (take + skip) < take) {
      bits |= std::uint64_t{1} << i;
      --remaining;
    }
  }
  return CubeState(n, bits);
}

template <Scalar T>
T inclusion_probability(const CondBernoulliSpec<T>& spec, int i) {
  if (i < 0 || i >= spec.n()) throw std::out_of_range("coordinate index out of range");
  if (spec.k() == 0) return T(0);
  std::vector<T> rest;
  rest.reserve(spec.p().size());
  for (int j = 0; j < spec.n(); ++j) {
    if (j != i) rest.push_back(spec.p()[static_cast<std::size_t>(j)]);
  }
  const T& q = spec.p()[static_cast<std::size_t>(i)];
  return T(q * poisson_binomial<T>(rest, spec.k() - 1) / spec.normalizer());
}

template <Scalar T>
CondBernoulliSpec<T> condition(const CondBernoulliSpec<T>& spec, std::span<const int> coords,
                               std::span<const int> values) {
  if (coords.size() != values.size()) throw std::invalid_argument("one value per conditioned coordinate");
  std::vector<bool> fixed(static_cast<std::size_t>(spec.n()), false);
  int ones = 0;
  for (std::size_t s = 0; s < coords.size(); ++s) {
    const int c = coords[s];
    if (c < 0 || c >= spec.n()) throw std::out_of_range("conditioned coordinate out of range");
    if (fixed[static_cast<std::size_t>(c)]) throw std::invalid_argument("conditioned coordinates repeat");
    if (values[s] != 0 && values[s] != 1) throw std::invalid_argument("conditioned values must be bits");
    fixed[static_cast<std::size_t>(c)] = true;
    ones += values[s];
  }
  const int free_count = spec.n() - static_cast<int>(coords.size());
  const int k = spec.k() - ones;
  if (k < 0 || k > free_count) throw std::invalid_argument("infeasible conditioning assignment");
  std::vector<T> p;
  for (int j = 0; j < spec.n(); ++j) {
    if (!fixed[static_cast<std::size_t>(j)]) p.push_back(spec.p()[static_cast<std::size_t>(j)]);
  }
  return CondBernoulliSpec<T>(std::move(p), k);
}

template <Scalar T>
DistributionTable<T> to_table(const CondBernoulliSpec<T>& spec) {
  DistributionTable<T> table;
  table.support = enumerate_slice(spec.n(), spec.k());
  table.probs.reserve(table.support.size());
  for (const auto& x : table.support) table.probs.push_back(pmf(spec, x));
  return table;
}

ExactCondBernoulli to_exact(const CondBernoulli& spec) {
  std::vector<Rational> p;
  for (double q : spec.p()) p.push_back(exact_rational(q));
  return ExactCondBernoulli(std::move(p), spec.k());
}

CondBernoulli to_float(const ExactCondBernoulli& spec) {
  std::vector<double> p;
  for (const auto& q : spec.p()) p.push_back(to_double(q));
  return CondBernoulli(std::move(p), spec.k());
}

DistributionTable<double> to_float(const DistributionTable<Rational>& table) {
  DistributionTable<double> out;
  out.support = table.support;
  for (const auto& q : table.probs) out.probs.push_back(to_double(q));
  return out;
}

namespace {

nlohmann::json parse_spec_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.is_object() || !j.contains("p") || !j.contains("k")) {
    throw std::invalid_argument("spec JSON needs fields \"p\" and \"k\"");
  }
  if (!j["p"].is_array()) throw std::invalid_argument("spec field \"p\" must be an array");
  if (!j["k"].is_number_integer()) throw std::invalid_argument("spec field \"k\" must be an integer");
  return j;
}

}  // namespace

std::string spec_to_json(const CondBernoulli& spec) {
  nlohmann::json j;
  j["p"] = spec.p();
  j["k"] = spec.k();
  return j.dump();
}

CondBernoulli spec_from_json(const std::string& text) {
  return to_float(exact_spec_from_json(text));
}

ExactCondBernoulli exact_spec_from_json(const std::string& text) {
  const auto j = parse_spec_json(text);
  std::vector<Rational> p;
  for (const auto& e : j["p"]) {
    if (e.is_string()) {
      p.push_back(parse_rational(e.get<std::string>()));
    } else if (e.is_number()) {
      p.push_back(exact_rational(e.get<double>()));
    } else {
      throw std::invalid_argument("entries of \"p\" must be numbers or \"a/b\" strings");
    }
  }
  return ExactCondBernoulli(std::move(p), j["k"].get<int>());
}

std::string table_to_csv(const DistributionTable<double>& table) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "state,probability\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.support[i].to_string() << ',' << table.probs[i] << '\n';
  }
  return out.str();
}

#define NEGDEP_INSTANTIATE(T)                                                                  \
  template struct DistributionTable<T>;                                                        \
  template class CondBernoulliSpec<T>;                                                         \
  template T poisson_binomial<T>(std::span<const T>, int);                                     \
  template T pmf<T>(const CondBernoulliSpec<T>&, const CubeState&);                            \
  template T inclusion_probability<T>(const CondBernoulliSpec<T>&, int);                       \
  template CondBernoulliSpec<T> condition<T>(const CondBernoulliSpec<T>&, std::span<const int>, \
                                             std::span<const int>);                            \
  template DistributionTable<T> to_table<T>(const CondBernoulliSpec<T>&);

NEGDEP_INSTANTIATE(double)
NEGDEP_INSTANTIATE(Rational)

#undef NEGDEP_INSTANTIATE

}  // namespace negdep
