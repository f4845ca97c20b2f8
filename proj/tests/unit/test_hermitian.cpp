#include "negdep/hermitian.hpp"
#include "negdep/random.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace negdep;

namespace {

Hermitian random_hermitian(int d, RandomStream& rng) {
  std::normal_distribution<double> g;
  Hermitian m(d, d);
  for (int i = 0; i < d; ++i) {
    m(i, i) = g(rng);
    for (int j = i + 1; j < d; ++j) {
      m(i, j) = std::complex<double>(g(rng), g(rng));
      m(j, i) = std::conj(m(i, j));
    }
  }
  return m;
}

Hermitian diag(std::initializer_list<double> v) {
  Hermitian m = Hermitian::Zero(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) m(i, i) = x, ++i;
  return m;
}

// Power iteration on A^2 gives the operator norm.
double power_norm(const Hermitian& a) {
  const Hermitian sq = a * a;
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(a.rows());
  double lambda = 0.0;
  for (int it = 0; it < 20000; ++it) {
    const Eigen::VectorXcd w = sq * v;
    const double next = w.norm();
    v = w / next;
    if (std::abs(next - lambda) < 1e-15 * next) break;
    lambda = next;
  }
  return std::sqrt(lambda);
}

}  // namespace

TEST_CASE("eigenvalues and norms") {
  CHECK(lambda_max(identity_matrix(3)) == doctest::Approx(1.0));
  CHECK(op_norm(identity_matrix(3)) == doctest::Approx(1.0));
  const auto m = diag({3.0, -5.0});
  CHECK(lambda_max(m) == doctest::Approx(3.0));
  CHECK(lambda_min(m) == doctest::Approx(-5.0));
  CHECK(op_norm(m) == doctest::Approx(5.0));
  Hermitian bad(2, 2);
  bad << 1.0, 2.0, 3.0, 1.0;
  CHECK_THROWS(lambda_max(bad));
  RandomStream rng(81);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_hermitian(1 + static_cast<int>(rng() % 5), rng);
    CHECK(std::abs(op_norm(a) - power_norm(a)) < 1e-9 * std::max(1.0, op_norm(a)));
  }
}

TEST_CASE("psd order") {
  const auto a = diag({1.0, 0.0});
  const auto b = diag({0.0, 1.0});
  CHECK(psd_leq(a, a));
  CHECK_FALSE(psd_leq(a, b));
  CHECK_FALSE(psd_leq(b, a));
  CHECK_THROWS(psd_leq(a, identity_matrix(3)));
  RandomStream rng(82);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = random_hermitian(3, rng);
    const auto y = random_hermitian(3, rng);
    CHECK(psd_leq(Hermitian::Zero(3, 3), square(x)));
    // (x + y)^2 <= 2 x^2 + 2 y^2
    CHECK(psd_leq(square(x + y), 2.0 * square(x) + 2.0 * square(y)));
    const Hermitian p = square(y);
    CHECK(psd_leq(x, x + p));
    CHECK(psd_leq(x + p, x + p + square(x)));
    CHECK(psd_leq(x, x + p + square(x)));
    const auto s = abs_matrix(x);
    CHECK((s * s - square(x)).norm() < 1e-9);
    CHECK(lambda_min(s) >= -1e-12);
  }
}

TEST_CASE("variance proxies") {
  std::vector<Hermitian> eye(6, identity_matrix(2));
  for (int k = 0; k <= 6; ++k) {
    CHECK(sigma_thm35(eye, k).value == doctest::Approx(16.0 * k));
    if (k < 6) CHECK(sigma_rem37(eye, k).value == doctest::Approx(16.0 * k));
  }
  // With k = n no coordinate lies outside the full set: 8 (5 + 6) from |I| = 5.
  CHECK(sigma_rem37(eye, 6).value == doctest::Approx(88.0));
  std::vector<Hermitian> axes;
  for (int i = 0; i < 3; ++i) {
    Hermitian m = Hermitian::Zero(3, 3);
    m(i, i) = 1.0;
    axes.push_back(m);
  }
  for (int k = 1; k <= 3; ++k) CHECK(sigma_thm35(axes, k).value == doctest::Approx(16.0));
  // Delta / (R rho) = k reproduces the subset size of the plain proxy.
  CHECK(sigma_prop47(eye, 1.0, 3.0, 1.0).value == doctest::Approx(8.0 * 3.0));

  RandomStream rng(83);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 6);
    std::vector<Hermitian> c;
    for (int i = 0; i < n; ++i) c.push_back(abs_matrix(random_hermitian(2, rng)));
    const int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    const auto exact = sigma_thm35(c, k);
    const auto upper = sigma_thm35(c, k, ProxyMode::upper);
    CHECK(exact.exact);
    CHECK_FALSE(upper.exact);
    CHECK(upper.value >= exact.value - 1e-12);
    // Direct enumeration oracle.
    double best = 0.0;
    for_each_subset(n, k, [&](std::span<const int> idx) {
      Hermitian s = Hermitian::Zero(2, 2);
      for (int i : idx) s += square(c[static_cast<std::size_t>(i)]);
      best = std::max(best, op_norm(s));
    });
    CHECK(std::abs(exact.value - 16.0 * best) < 1e-12 * std::max(1.0, best));
    // Inflating one C_i never lowers the proxy.
    auto bigger = c;
    bigger[0] *= 1.5;
    CHECK(sigma_thm35(bigger, k).value >= exact.value - 1e-12);
    CHECK(sigma_rem37(bigger, k).value >= sigma_rem37(c, k).value - 1e-12);
  }
}

TEST_CASE("matrix bounds") {
  CHECK(thm35_bound(3, 1.0, 0.0) == 3.0);
  CHECK(thm35_bound(2, 1.0, 1.0) == doctest::Approx(2.0 / std::sqrt(std::exp(1.0))));
  CHECK_THROWS(thm35_bound(2, 0.0, 1.0));
  CHECK(aoun_matrix_bound(2, 2.0, 1.0, 0.0) == 2.0);
  CHECK_THROWS(aoun_matrix_bound(2, 2.0, 0.0, 1.0));
}

TEST_CASE("matrix carre du champ") {
  const auto g = build_glauber_uniform<double>(3);
  std::vector<Hermitian> flat(g.size(), identity_matrix(2));
  for (std::size_t x = 0; x < g.size(); ++x) CHECK(matrix_gamma(g, flat, x).norm() < 1e-15);
  RandomStream rng(84);
  std::vector<Hermitian> one(g.size());
  std::vector<double> scalar(g.size());
  for (std::size_t x = 0; x < g.size(); ++x) {
    scalar[x] = rng.uniform();
    one[x] = Hermitian::Constant(1, 1, scalar[x]);
  }
  for (std::size_t x = 0; x < g.size(); ++x) {
    double expected = 0.0;
    for (std::size_t y = 0; y < g.size(); ++y) {
      if (y != x) expected += 0.5 * (scalar[x] - scalar[y]) * (scalar[x] - scalar[y]) * g.rate(x, y);
    }
    CHECK(matrix_gamma(g, one, x)(0, 0).real() == doctest::Approx(expected));
  }
}

TEST_CASE("subset lemma") {
  std::vector<Hermitian> d = {identity_matrix(2), 2.0 * identity_matrix(2), 3.0 * identity_matrix(2)};
  const std::vector<double> hot = {0.0, 1.0, 0.0};
  const auto h = km_subset_bound(hot, d, 1.0, 1.0);
  CHECK(h.subset_size == 1);
  CHECK(h.lhs <= h.rhs + 1e-12);
  const std::vector<double> ones = {1.0, 1.0, 1.0};
  const auto all = km_subset_bound(ones, d, 3.0, 1.0);
  CHECK(all.subset_size == 3);
  CHECK(all.lhs == doctest::Approx(all.rhs));
  CHECK_THROWS(km_subset_bound(ones, d, 2.0, 1.0));
  CHECK_THROWS(km_subset_bound(ones, d, 3.0, 0.5));

  RandomStream rng(85);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 10);
    const int dim = 1 + static_cast<int>(rng() % 3);
    std::vector<Hermitian> ds;
    std::vector<double> t(static_cast<std::size_t>(n));
    double t1 = 0.0;
    double tinf = 0.0;
    for (int i = 0; i < n; ++i) {
      ds.push_back(square(random_hermitian(dim, rng)));
      t[static_cast<std::size_t>(i)] = rng.uniform();
      t1 += t[static_cast<std::size_t>(i)];
      tinf = std::max(tinf, t[static_cast<std::size_t>(i)]);
    }
    const auto r = km_subset_bound(t, ds, t1, tinf);
    CHECK(r.lhs <= r.rhs + 1e-9);
  }
}

TEST_CASE("json matrices") {
  const auto m = hermitian_from_json("[[[1,0],[0,2]],[[0,-2],[3,0]]]");
  CHECK(m(0, 1) == std::complex<double>(0.0, 2.0));
  CHECK(m(1, 0) == std::complex<double>(0.0, -2.0));
  CHECK_THROWS(hermitian_from_json("[[[1,0],[1,0]],[[2,0],[3,0]]]"));
}
