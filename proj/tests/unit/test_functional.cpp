#include "negdep/functional.hpp"
#include "negdep/random.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

using namespace negdep;

namespace {

Rational q(long a, long b) { return Rational(a) / Rational(b); }

std::vector<double> random_function(std::size_t size, RandomStream& rng, double lo = -1.0, double hi = 1.0) {
  std::vector<double> f(size);
  for (auto& v : f) v = lo + (hi - lo) * rng.uniform();
  return f;
}

// Two-state chain with rate 1 each way, as the one-coordinate Glauber walk.
Generator<double> two_state() { return build_glauber_uniform<double>(1); }

}  // namespace

TEST_CASE("carre du champ") {
  const auto g = build_bernoulli_laplace<Rational>(2, 1);
  const std::vector<Rational> f = {0, 1};
  CHECK(gamma<Rational>(g, f, 0) == q(1, 4));
  CHECK(gamma<Rational>(g, f, 1) == q(1, 4));
  const std::vector<Rational> c = {3, 3};
  CHECK(gamma<Rational>(g, c, 0) == 0);
  CHECK(gamma_plus<Rational>(g, c, 1) == 0);
  // Gamma_+ vanishes where f is smallest.
  const auto lo = f[0] < f[1] ? 0U : 1U;
  CHECK(gamma_plus<Rational>(g, f, lo) == 0);
}

TEST_CASE("reversibility identities in exact arithmetic") {
  const std::vector<Rational> p = {q(1, 5), q(1, 2), q(7, 10), q(2, 5), q(3, 10)};
  const auto g = build_hermon_salez<Rational>(p, 2);
  RandomStream rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Rational> f(g.size());
    std::vector<Rational> h(g.size());
    for (auto& v : f) v = q(static_cast<long>(rng() % 21) - 10, 7);
    for (auto& v : h) v = q(static_cast<long>(rng() % 21) - 10, 3);
    Rational pg = 0;
    Rational pgp = 0;
    Rational pgfh = 0;
    for (std::size_t x = 0; x < g.size(); ++x) {
      pg += g.stationary[x] * gamma<Rational>(g, f, x);
      pgp += g.stationary[x] * gamma_plus<Rational>(g, f, x);
      pgfh += g.stationary[x] * gamma<Rational>(g, f, h, x);
    }
    CHECK(pg == dirichlet<Rational>(g, f, f));
    CHECK(pgp == pg);
    CHECK(dirichlet<Rational>(g, f, h) == dirichlet<Rational>(g, h, f));
    CHECK(dirichlet<Rational>(g, f, h) == pgfh);
    const std::vector<Rational> ones(g.size(), 1);
    CHECK(dirichlet<Rational>(g, f, ones) == 0);
  }
}

TEST_CASE("entropy") {
  const std::vector<double> pi = {0.5, 0.5};
  CHECK(entropy(pi, std::vector<double>{2.0, 2.0}) == doctest::Approx(0.0));
  // pi(f log f) - pi(f) log pi(f) with f = (1, 0).
  const double direct = 0.5 * (1.0 * std::log(1.0)) - 0.5 * std::log(0.5);
  CHECK(entropy(pi, std::vector<double>{1.0, 0.0}) == doctest::Approx(direct));
  CHECK(direct == doctest::Approx(0.5 * std::log(2.0)));
  CHECK_THROWS(entropy(pi, std::vector<double>{-1.0, 1.0}));
  RandomStream rng(42);
  const std::vector<double> pr = {0.1, 0.2, 0.3, 0.4};
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = random_function(4, rng, 0.0, 3.0);
    const double c = 0.1 + 5 * rng.uniform();
    std::vector<double> cf(f);
    for (auto& v : cf) v *= c;
    CHECK(entropy(pr, f) >= 0.0);
    CHECK(entropy(pr, cf) == doctest::Approx(c * entropy(pr, f)).epsilon(1e-10));
  }
  CHECK(variance(pi, std::vector<double>{0.0, 2.0}) == doctest::Approx(1.0));
}

TEST_CASE("spectral gap") {
  CHECK(spectral_gap(build_bernoulli_laplace<double>(2, 1)) == doctest::Approx(1.0));
  CHECK(spectral_gap(build_glauber_uniform<double>(3)) == doctest::Approx(2.0));
  // Independent oracle: dense symmetric eigen-solve on the 3-cube.
  const auto g = build_glauber_uniform<double>(3);
  Eigen::MatrixXd m(8, 8);
  for (std::size_t x = 0; x < 8; ++x) {
    for (std::size_t y = 0; y < 8; ++y) m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = -g.rate(x, y);
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  CHECK(es.eigenvalues()(1) == doctest::Approx(spectral_gap(g)));

  const std::vector<double> p = {0.3, 0.6, 0.45, 0.8};
  const auto hs = build_hermon_salez<double>(p, 2);
  const double gap = spectral_gap(hs);
  RandomStream rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = random_function(hs.size(), rng);
    CHECK(variance(hs.stationary, f) <= dirichlet<double>(hs, f, f) / gap + 1e-12);
  }
  Generator<double> broken = build_glauber_uniform<double>(1);
  broken.rates.assign(broken.rates.size(), 0.0);
  CHECK_THROWS(spectral_gap(broken));
}

TEST_CASE("mlsi estimate") {
  MlsiOptions opts;
  opts.restarts = 40;
  const auto r = mlsi_upper_estimate(two_state(), opts);
  CHECK(std::abs(r.estimate - 4.0) < 0.04);
  CHECK(r.estimate >= 4.0 - 1e-9);
  CHECK(r.restarts == 40);

  // Time change scales the constant.
  const auto fast = mlsi_upper_estimate(scaled<double>(two_state(), 3.0), opts);
  CHECK(fast.estimate == doctest::Approx(3.0 * r.estimate).epsilon(1e-3));

  const auto bl = build_bernoulli_laplace<double>(4, 2);
  const auto m = mlsi_upper_estimate(bl, opts);
  CHECK(m.estimate >= 0.5 - 1e-9);
  CHECK(spectral_gap(bl) >= m.estimate / 2 - 1e-9);
  CHECK(mlsi_ratio(bl, m.worst_candidate) == doctest::Approx(m.estimate));
  CHECK(stability_functional(bl) / m.estimate >= 0.25 - 1e-9);

  const std::vector<double> p = {0.3, 0.6, 0.45, 0.8};
  const auto hs = build_hermon_salez<double>(p, 2);
  CHECK(mlsi_upper_estimate(hs, opts).estimate >= 1.0 - 1e-9);
}

TEST_CASE("scalar bounds") {
  CHECK(herbst_bound(4.0, 1.0, 0.0) == 1.0);
  CHECK(herbst_bound(4.0, 1.0, 2.0) == doctest::Approx(std::exp(-4.0)));
  CHECK_THROWS(herbst_bound(0.0, 1.0, 1.0));
  CHECK_THROWS(herbst_bound(1.0, 0.0, 1.0));

  const WeightVector ones(std::vector<double>(6, 1.0));
  CHECK(prop46_bound(1.0, 2.0, 1.0, ones, 0.0) == 1.0);
  // ceil(delta / (R rho)) = 2 picks two weights; the second form wins.
  CHECK(prop46_bound(1.0, 2.0, 1.0, ones, 3.0) == doctest::Approx(std::exp(-9.0 / 32.0)));
  CHECK_THROWS(prop46_bound(-1.0, 2.0, 1.0, ones, 3.0));
}

TEST_CASE("bounds dominate exact tails") {
  RandomStream rng(44);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 4);
    const int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n - 1));
    std::vector<double> p(static_cast<std::size_t>(n));
    for (auto& v : p) v = 0.1 + 0.8 * rng.uniform();
    const auto g = build_hermon_salez<double>(p, k);
    std::vector<double> a(static_cast<std::size_t>(n));
    for (auto& v : a) v = rng.uniform();
    const WeightVector alpha(a);
    std::vector<double> f(g.size());
    for (std::size_t x = 0; x < g.size(); ++x) {
      for (int i = 0; i < n; ++i) f[x] += g.support[x][i] ? a[static_cast<std::size_t>(i)] : 0.0;
    }
    double gp = 0.0;
    for (std::size_t x = 0; x < g.size(); ++x) gp = std::max(gp, gamma_plus<double>(g, f, x));
    const double mean = expectation<double>(g.stationary, f);
    for (double t = 0.0; t < 3.0; t += 0.1) {
      double tail = 0.0;
      for (std::size_t x = 0; x < g.size(); ++x) tail += f[x] >= mean + t ? g.stationary[x] : 0.0;
      if (gp > 0) CHECK(tail <= herbst_bound(1.0, gp, t) + 1e-12);
      CHECK(tail <= prop46_bound(2.0, delta(g), 1.0, alpha, t) + 1e-12);
    }
  }
}

TEST_CASE("moment estimate") {
  CHECK(moment_constant() == doctest::Approx(std::sqrt(3 * std::sqrt(std::exp(1.0)) / (std::sqrt(std::exp(1.0)) - 1))));
  const std::vector<double> p = {0.3, 0.6, 0.45, 0.8, 0.2};
  const auto g = build_hermon_salez<double>(p, 2);
  const std::vector<double> c(g.size(), 1.5);
  const auto flat = moment_check(g, c, 2.0, 1.0);
  CHECK(flat.pass);
  CHECK(flat.lhs == 0.0);
  RandomStream rng(45);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = random_function(g.size(), rng);
    for (double pp : {2.0, 4.0, 8.0, 16.0}) {
      const auto m = moment_check(g, f, pp, 1.0);
      CHECK(m.pass);
      CHECK(m.ratio <= 1.0);
    }
  }
}

TEST_CASE("audit json") {
  MlsiOptions opts;
  opts.restarts = 5;
  const auto r = mlsi_upper_estimate(two_state(), opts);
  const auto text = audit_report_json(1.0, r);
  CHECK(text.find("\"mlsi_estimate\"") != std::string::npos);
}
