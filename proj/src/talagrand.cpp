#include "negdep/talagrand.hpp"

#include "negdep/functional.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace negdep {

namespace {

constexpr double kGapTolerance = 1e-12;
constexpr int kMaxIterations = 200000;

struct Reduced {
  std::vector<std::uint64_t> masks;
  std::vector<std::size_t> source;  // an index into A for each mask
};

Reduced reduce(const CubeState& x, std::span<const CubeState> a) {
  std::vector<std::pair<std::uint64_t, std::size_t>> all;
  all.reserve(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j].size() != x.size()) throw std::invalid_argument("state lengths differ");
    all.emplace_back(a[j].bits() ^ x.bits(), j);
  }
  // Fewer differing coordinates first so subsets are seen before supersets.
  std::stable_sort(all.begin(), all.end(), [](const auto& u, const auto& v) {
    const int pu = std::popcount(u.first);
    const int pv = std::popcount(v.first);
    return pu != pv ? pu < pv : u.first < v.first;
  });
  Reduced r;
  for (const auto& [mask, j] : all) {
    bool dominated = false;
    for (auto kept : r.masks) {
      if ((kept & mask) == kept) {
        dominated = true;
        break;
      }
    }
    if (!dominated) {
      r.masks.push_back(mask);
      r.source.push_back(j);
    }
  }
  return r;
}

double dot(const std::vector<double>& u, const std::vector<double>& v) {
  return std::inner_product(u.begin(), u.end(), v.begin(), 0.0);
}

double column_dot(std::uint64_t mask, const std::vector<double>& c) {
  double s = 0.0;
  while (mask) {
    s += c[static_cast<std::size_t>(std::countr_zero(mask))];
    mask &= mask - 1;
  }
  return s;
}

std::vector<double> image(const std::vector<std::uint64_t>& masks, const std::vector<double>& mu, int n) {
  std::vector<double> c(static_cast<std::size_t>(n), 0.0);
  for (std::size_t j = 0; j < masks.size(); ++j) {
    if (mu[j] == 0.0) continue;
    for (int i = 0; i < n; ++i) {
      if ((masks[j] >> i) & 1U) c[static_cast<std::size_t>(i)] += mu[j];
    }
  }
  return c;
}

// Minimizer of |M_S w|^2 subject to sum w = 1 on the support S of mu; returns
// false if the solution leaves the simplex.
bool kkt_polish(const std::vector<std::uint64_t>& masks, std::vector<double>& mu) {
  std::vector<std::size_t> s;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    if (mu[j] > 0.0) s.push_back(j);
  }
  const auto m = static_cast<Eigen::Index>(s.size());
  if (m <= 1) return true;
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
  for (Eigen::Index u = 0; u < m; ++u) {
    for (Eigen::Index v = 0; v < m; ++v) {
      kkt(u, v) = 2.0 * std::popcount(masks[s[static_cast<std::size_t>(u)]] & masks[s[static_cast<std::size_t>(v)]]);
    }
    kkt(u, m) = 1.0;
    kkt(m, u) = 1.0;
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
  rhs(m) = 1.0;
  const Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
  if (!sol.allFinite()) return false;
  double total = 0.0;
  for (Eigen::Index u = 0; u < m; ++u) {
    if (sol(u) < -1e-13) return false;
    total += std::max(0.0, sol(u));
  }
  if (!(total > 0.0)) return false;
  for (Eigen::Index u = 0; u < m; ++u) mu[s[static_cast<std::size_t>(u)]] = std::max(0.0, sol(u)) / total;
  return true;
}

}  // namespace

ConvexDistanceResult convex_distance(const CubeState& x, std::span<const CubeState> a) {
  if (a.empty()) throw std::invalid_argument("convex distance to an empty set");
  const int n = x.size();
  const Reduced r = reduce(x, a);
  ConvexDistanceResult out;
  out.optimal_mu.assign(a.size(), 0.0);
  out.dual_alpha.assign(static_cast<std::size_t>(n), 0.0);
  if (r.masks.front() == 0) {
    out.optimal_mu[r.source.front()] = 1.0;
    return out;
  }
  const std::size_t m = r.masks.size();
  std::vector<double> mu(m, 0.0);
  mu[0] = 1.0;
  std::vector<double> c = image(r.masks, mu, n);
  std::vector<double> s(m);
  std::vector<double> dc(static_cast<std::size_t>(n));
  auto column = [&](std::size_t j, double sign, std::vector<double>& into) {
    for (int i = 0; i < n; ++i) {
      if ((r.masks[j] >> i) & 1U) into[static_cast<std::size_t>(i)] += sign;
    }
  };
  int it = 0;
  for (; it < kMaxIterations && m > 1; ++it) {
    const double cc = dot(c, c);
    std::size_t fw = 0;
    std::size_t aw = m;
    for (std::size_t j = 0; j < m; ++j) {
      s[j] = column_dot(r.masks[j], c);
      if (s[j] < s[fw]) fw = j;
      if (mu[j] > 0.0 && (aw == m || s[j] > s[aw])) aw = j;
    }
    const double fw_gap = cc - s[fw];
    const double aw_gap = s[aw] - cc;
    if (2.0 * std::max(fw_gap, 0.0) < kGapTolerance) break;
    double gamma_max = 1.0;
    bool toward = true;
    if (fw_gap >= aw_gap || mu[aw] >= 1.0) {
      for (int i = 0; i < n; ++i) dc[static_cast<std::size_t>(i)] = -c[static_cast<std::size_t>(i)];
      column(fw, 1.0, dc);
    } else {
      toward = false;
      for (int i = 0; i < n; ++i) dc[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)];
      column(aw, -1.0, dc);
      gamma_max = mu[aw] / (1.0 - mu[aw]);
    }
    const double dd = dot(dc, dc);
    if (!(dd > 0.0)) break;
    const double gamma = std::clamp(-dot(c, dc) / dd, 0.0, gamma_max);
    if (gamma == 0.0) break;
    if (toward) {
      for (auto& w : mu) w *= 1.0 - gamma;
      mu[fw] += gamma;
    } else {
      for (auto& w : mu) w *= 1.0 + gamma;
      mu[aw] -= gamma;
      if (gamma == gamma_max || mu[aw] < 1e-300) mu[aw] = 0.0;
    }
    for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] += gamma * dc[static_cast<std::size_t>(i)];
  }
  out.iterations = it;

  auto certify = [&](const std::vector<double>& weights, double& value, double& gap) {
    const auto cw = image(r.masks, weights, n);
    value = std::sqrt(dot(cw, cw));
    double best = std::numeric_limits<double>::infinity();
    for (auto mask : r.masks) best = std::min(best, column_dot(mask, cw));
    gap = value - best / value;
    return cw;
  };
  double value = 0.0;
  double gap = 0.0;
  c = certify(mu, value, gap);
  std::vector<double> polished = mu;
  if (kkt_polish(r.masks, polished)) {
    double pv = 0.0;
    double pg = 0.0;
    const auto pc = certify(polished, pv, pg);
    if (std::abs(pg) <= std::abs(gap) && pv <= value + 1e-12) {
      mu = polished;
      c = pc;
      value = pv;
      gap = pg;
    }
  }
  out.value = value;
  out.squared = dot(c, c);
  out.gap = gap;
  for (int i = 0; i < n; ++i) out.dual_alpha[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)] / value;
  for (std::size_t j = 0; j < m; ++j) out.optimal_mu[r.source[j]] = mu[j];
  return out;
}

std::vector<double> convex_distance_squared(std::span<const CubeState> support, std::span<const CubeState> a) {
  std::vector<double> out;
  out.reserve(support.size());
  for (const auto& x : support) out.push_back(convex_distance(x, a).squared);
  return out;
}

TalagrandValue talagrand_from_squared(const DistributionTable<double>& pi, double measure,
                                      std::span<const double> squared, double divisor) {
  if (!(divisor > 0.0)) throw std::invalid_argument("divisor must be positive");
  if (squared.size() != pi.size()) throw std::invalid_argument("distance table does not match the support");
  TalagrandValue out;
  out.measure = measure;
  out.vacuous = !(measure > 0.0);
  double e = 0.0;
  double plain = 0.0;
  for (std::size_t x = 0; x < pi.size(); ++x) {
    e += pi.probs[x] * std::exp(squared[x] / divisor);
    plain += pi.probs[x] * squared[x] / divisor;
  }
  out.value = measure * e;
  out.plain = measure * plain;
  return out;
}

TalagrandValue talagrand_functional(const DistributionTable<double>& pi, std::span<const CubeState> a,
                                    double divisor) {
  if (a.empty()) throw std::invalid_argument("Talagrand functional of an empty set");
  double measure = 0.0;
  std::vector<CubeState> sorted(a.begin(), a.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (const auto& z : sorted) {
    const auto j = pi.index_of(z);
    if (j >= 0) measure += pi.probs[static_cast<std::size_t>(j)];
  }
  std::vector<double> squared;
  double max_gap = 0.0;
  for (const auto& x : pi.support) {
    const auto r = convex_distance(x, sorted);
    squared.push_back(r.squared);
    max_gap = std::max(max_gap, std::abs(r.gap));
  }
  auto out = talagrand_from_squared(pi, measure, squared, divisor);
  out.max_gap = max_gap;
  return out;
}

double cor32_bound(double lipschitz, double t) {
  if (!(lipschitz > 0.0)) throw std::invalid_argument("Lipschitz constant must be positive");
  if (t < 0.0) throw std::invalid_argument("t must be nonnegative");
  return std::min(1.0, 4.0 * std::exp(-t * t / (84.0 * lipschitz * lipschitz)));
}

Lemma62Check check_lemma62(const Generator<double>& g, std::span<const CubeState> a) {
  const auto f = convex_distance_squared(g.support, a);
  Lemma62Check out;
  out.stability = stability_functional(g);
  out.worst_gamma_excess = -std::numeric_limits<double>::infinity();
  out.worst_pair_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < g.size(); ++x) {
    const double excess = gamma_plus<double>(g, f, x) - 8.0 * out.stability * f[x];
    out.worst_gamma_excess = std::max(out.worst_gamma_excess, excess);
    for (std::size_t y = 0; y < g.size(); ++y) {
      out.worst_pair_excess = std::max(out.worst_pair_excess, f[x] - f[y] - hamming(g.support[x], g.support[y]));
    }
  }
  out.pass = out.worst_gamma_excess <= 1e-9 && out.worst_pair_excess <= 1e-9;
  return out;
}

BobkovGotzeCheck bobkov_gotze_check(const Generator<double>& g, std::span<const double> f, double c, double t,
                                    double rho_lower) {
  if (f.size() != g.size()) throw std::invalid_argument("function table does not match the support");
  if (!(c > 0.0) || !(rho_lower > 0.0)) throw std::invalid_argument("C and rho must be positive");
  if (!(t > c / rho_lower)) throw std::invalid_argument("t must exceed C/rho");
  BobkovGotzeCheck out;
  double mean = 0.0;
  for (std::size_t x = 0; x < g.size(); ++x) {
    if (f[x] < 0.0) throw std::invalid_argument("f must be nonnegative");
    if (gamma_plus<double>(g, f, x) > c * f[x] + 1e-12) out.precondition = false;
    out.lhs += g.stationary[x] * std::exp(f[x] / t);
    mean += g.stationary[x] * f[x];
  }
  out.rhs = std::exp(mean / (t - c / rho_lower));
  out.pass = out.precondition && out.lhs <= out.rhs * (1.0 + 1e-12);
  return out;
}

}  // namespace negdep
