#include "negdep/functional.hpp"
#include "negdep/talagrand.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace negdep;

namespace {

// Exact QP by active sets: for every support S of mu solve the equality
// constrained problem through its KKT system and keep the feasible minima.
double active_set_oracle(const CubeState& x, const std::vector<CubeState>& a) {
  const int m = static_cast<int>(a.size());
  const int n = x.size();
  Eigen::MatrixXd diff(n, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) diff(i, j) = a[static_cast<std::size_t>(j)][i] != x[i] ? 1.0 : 0.0;
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t s = 1; s < (1U << m); ++s) {
    std::vector<int> idx;
    for (int j = 0; j < m; ++j) {
      if ((s >> j) & 1U) idx.push_back(j);
    }
    const auto sz = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(sz + 1, sz + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sz + 1);
    for (Eigen::Index u = 0; u < sz; ++u) {
      for (Eigen::Index v = 0; v < sz; ++v) kkt(u, v) = 2 * diff.col(idx[static_cast<std::size_t>(u)]).dot(diff.col(idx[static_cast<std::size_t>(v)]));
      kkt(u, sz) = 1.0;
      kkt(sz, u) = 1.0;
    }
    rhs(sz) = 1.0;
    const Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    if ((kkt * sol - rhs).norm() > 1e-9) continue;
    bool feasible = true;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    for (Eigen::Index u = 0; u < sz; ++u) {
      if (sol(u) < -1e-12) feasible = false;
      c += sol(u) * diff.col(idx[static_cast<std::size_t>(u)]);
    }
    if (feasible) best = std::min(best, c.squaredNorm());
  }
  return best;
}

std::vector<CubeState> random_subset(const std::vector<CubeState>& pool, std::size_t size, RandomStream& rng) {
  std::vector<CubeState> out(pool);
  for (std::size_t i = 0; i + 1 < out.size(); ++i) std::swap(out[i], out[i + rng() % (out.size() - i)]);
  out.resize(std::min(size, out.size()));
  return out;
}

}  // namespace

TEST_CASE("small convex distances") {
  const auto x = CubeState::parse("00");
  const std::vector<CubeState> in = {CubeState::parse("00"), CubeState::parse("11")};
  const auto zero = convex_distance(x, in);
  CHECK(zero.value == 0.0);
  CHECK(std::all_of(zero.dual_alpha.begin(), zero.dual_alpha.end(), [](double v) { return v == 0.0; }));

  const std::vector<CubeState> pair = {CubeState::parse("10"), CubeState::parse("01")};
  const auto half = convex_distance(x, pair);
  CHECK(half.value == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(half.optimal_mu[0] == doctest::Approx(0.5));
  CHECK(half.gap < 1e-9);

  CHECK_THROWS(convex_distance(x, std::vector<CubeState>{}));

  RandomStream rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    const CubeState u(8, rng() & 0xFF);
    const CubeState v(8, rng() & 0xFF);
    const std::vector<CubeState> single = {v};
    CHECK(convex_distance(u, single).value == doctest::Approx(std::sqrt(hamming(u, v))).epsilon(1e-12));
  }
}

TEST_CASE("agrees with the active-set oracle") {
  RandomStream rng(62);
  const auto cube = enumerate_cube(6);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = random_subset(cube, 1 + rng() % 6, rng);
    const CubeState x = cube[rng() % cube.size()];
    const auto r = convex_distance(x, a);
    CHECK(std::abs(r.squared - active_set_oracle(x, a)) < 1e-9);
    CHECK(r.gap < 1e-9);
    // The dual certificate is a unit vector attaining the value on every z in A.
    double norm = 0.0;
    for (double v : r.dual_alpha) norm += v * v;
    if (r.value > 0) {
      CHECK(std::abs(norm - 1.0) < 1e-9);
      double worst = std::numeric_limits<double>::infinity();
      for (const auto& z : a) {
        double s = 0.0;
        for (int i = 0; i < x.size(); ++i) s += z[i] != x[i] ? r.dual_alpha[static_cast<std::size_t>(i)] : 0.0;
        worst = std::min(worst, s);
      }
      CHECK(std::abs(worst - r.value) < 1e-9);
    }
    double mu_sum = 0.0;
    for (double w : r.optimal_mu) {
      CHECK(w >= 0.0);
      mu_sum += w;
    }
    CHECK(mu_sum == doctest::Approx(1.0));
  }
}

TEST_CASE("envelopes and monotonicity") {
  RandomStream rng(63);
  const auto cube = enumerate_cube(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto big = random_subset(cube, 2 + rng() % 20, rng);
    const std::vector<CubeState> small(big.begin(), big.begin() + static_cast<std::ptrdiff_t>(1 + rng() % (big.size() - 1)));
    const CubeState x = cube[rng() % cube.size()];
    int dh = 100;
    for (const auto& z : big) dh = std::min(dh, hamming(x, z));
    const double d = convex_distance(x, big).value;
    CHECK(d <= std::sqrt(dh) + 1e-9);
    CHECK(d >= dh / std::sqrt(7.0) - 1e-9);
    CHECK(d <= convex_distance(x, small).value + 1e-9);
  }
}

TEST_CASE("talagrand functional") {
  const auto pi = to_table(CondBernoulli({0.5, 0.5}, 1));
  const std::vector<CubeState> a = {CubeState::parse("10")};
  const auto v = talagrand_functional(pi, a, 84.0);
  CHECK(v.measure == doctest::Approx(0.5));
  CHECK(v.value == doctest::Approx(0.5 * (0.5 + 0.5 * std::exp(2.0 / 84.0))).epsilon(1e-14));
  CHECK(v.plain == doctest::Approx(0.5 * 0.5 * 2.0 / 84.0));
  CHECK(v.value == doctest::Approx(0.506).epsilon(1e-3));

  const auto full = talagrand_functional(pi, pi.support, 84.0);
  CHECK(full.value == doctest::Approx(1.0));

  const std::vector<CubeState> outside = {CubeState::parse("11")};
  CHECK(talagrand_functional(pi, outside, 84.0).vacuous);

  const std::vector<double> p = {0.3, 0.6, 0.45, 0.8, 0.2};
  const auto pk = to_table(CondBernoulli(p, 2));
  RandomStream rng(64);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = random_subset(pk.support, 1 + rng() % pk.size(), rng);
    const auto t = talagrand_functional(pk, s, 84.0);
    CHECK(t.value <= 1.0 + 1e-12);
    CHECK(t.plain <= t.value);
    CHECK(t.max_gap < 1e-9);
  }
}

TEST_CASE("corollary bound") {
  CHECK(cor32_bound(1.0, 0.0) == 1.0);
  // 4/e exceeds one, so the clamp applies.
  CHECK(cor32_bound(1.0, std::sqrt(84.0)) == 1.0);
  CHECK(cor32_bound(1.0, std::sqrt(84.0 * std::log(8.0))) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(cor32_bound(2.0, 2.0 * std::sqrt(84.0 * std::log(8.0))) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS(cor32_bound(0.0, 1.0));
}

TEST_CASE("lemma checks on the recursive generator") {
  const std::vector<double> p = {0.3, 0.6, 0.45, 0.8, 0.2, 0.5};
  const auto g = build_hermon_salez<double>(p, 3);
  const auto all = check_lemma62(g, g.support);
  CHECK(all.pass);
  CHECK(all.worst_gamma_excess <= 0.0);
  RandomStream rng(65);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_subset(g.support, 1 + rng() % 6, rng);
    const auto c = check_lemma62(g, a);
    CHECK(c.pass);
    CHECK(c.stability <= 2.0 + 1e-12);

    const auto d2 = convex_distance_squared(g.support, a);
    const double cst = 8.0 * stability_functional(g);
    const auto bg = bobkov_gotze_check(g, d2, cst, 84.0);
    CHECK(bg.precondition);
    CHECK(bg.pass);
    CHECK(bg.lhs <= bg.rhs);
  }
  const std::vector<double> flat(g.size(), 2.0);
  const auto bg = bobkov_gotze_check(g, flat, 0.001, 10.0);
  CHECK(bg.pass);
  CHECK(bg.lhs == doctest::Approx(std::exp(0.2)));
  CHECK_THROWS(bobkov_gotze_check(g, flat, 8.0, 8.0));
  std::vector<double> neg(g.size(), 1.0);
  neg[0] = -1.0;
  CHECK_THROWS(bobkov_gotze_check(g, neg, 8.0, 84.0));
  // A function violating the hypothesis is reported as such.
  std::vector<double> spike(g.size(), 0.0);
  spike[0] = 1.0;
  CHECK_FALSE(bobkov_gotze_check(g, spike, 1e-3, 84.0).precondition);
}
