#include "negdep/polynomial.hpp"
#include "negdep/random.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace negdep;

namespace {

double normal(RandomStream& rng) { return std::normal_distribution<double>()(rng); }

std::vector<double> unit_vector(std::size_t size, RandomStream& rng) {
  std::vector<double> v(size);
  double s = 0.0;
  for (auto& x : v) {
    x = normal(rng);
    s += x * x;
  }
  for (auto& x : v) x /= std::sqrt(s);
  return v;
}

std::size_t block_size(int n, const std::vector<int>& block) {
  std::size_t s = 1;
  for (std::size_t i = 0; i < block.size(); ++i) s *= static_cast<std::size_t>(n);
  return s;
}

IndexTensor random_tensor(int order, int n, RandomStream& rng) {
  IndexTensor t(order, n);
  for (auto& v : t.data()) v = normal(rng);
  return t;
}

TetrahedralPolynomial random_poly(int n, int degree, RandomStream& rng) {
  std::map<std::uint64_t, double> c;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
    if (std::popcount(s) <= degree && rng.uniform() < 0.5) c[s] = rng.uniform() * 2 - 1;
  }
  return TetrahedralPolynomial(n, c);
}

}  // namespace

TEST_CASE("walsh transform") {
  std::vector<double> x1(8);
  std::vector<double> x1x2(8);
  for (std::uint64_t b = 0; b < 8; ++b) {
    x1[b] = static_cast<double>(b & 1U);
    x1x2[b] = static_cast<double>((b & 1U) && (b & 2U));
  }
  const auto p = walsh_transform(3, x1);
  CHECK(p.coeffs().size() == 1);
  CHECK(p.coeff(1) == 1.0);
  CHECK(p.coeff(0) == 0.0);
  CHECK(p.degree() == 1);
  const auto q = walsh_transform(3, x1x2);
  CHECK(q.coeffs().size() == 1);
  CHECK(q.coeff(3) == 1.0);
  CHECK(q.degree() == 2);
  CHECK_THROWS(walsh_transform(3, std::vector<double>(7)));

  RandomStream rng(71);
  for (int n = 1; n <= 10; ++n) {
    std::vector<double> f(std::size_t{1} << n);
    for (auto& v : f) v = normal(rng);
    const auto poly = walsh_transform(n, f);
    for (std::uint64_t b = 0; b < f.size(); ++b) CHECK(std::abs(poly.evaluate(CubeState(n, b)) - f[b]) < 1e-9);
  }
}

TEST_CASE("multilinear extension agrees on cube points") {
  RandomStream rng(72);
  const auto f = random_poly(5, 3, rng);
  for (std::uint64_t b = 0; b < 32; ++b) {
    const CubeState x(5, b);
    std::vector<double> real(5);
    for (int i = 0; i < 5; ++i) real[static_cast<std::size_t>(i)] = x[i] ? 1.0 : 0.0;
    CHECK(f.evaluate(std::span<const double>(real)) == doctest::Approx(f.evaluate(x)));
  }
}

TEST_CASE("derivative tensors") {
  const TetrahedralPolynomial x1x2(3, {{3, 1.0}});
  for (std::uint64_t b = 0; b < 8; ++b) {
    const auto t = derivative_tensor(x1x2, 2, CubeState(3, b));
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const std::vector<int> idx = {i, j};
        const bool hit = (i == 0 && j == 1) || (i == 1 && j == 0);
        CHECK(t.at(idx) == (hit ? 1.0 : 0.0));
      }
    }
    CHECK(derivative_tensor(x1x2, 3, CubeState(3, b)).frobenius() == 0.0);
  }

  RandomStream rng(73);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 6;
    const auto f = random_poly(n, 3, rng);
    for (std::uint64_t b = 0; b < 64; b += 5) {
      const CubeState x(n, b);
      const auto grad = derivative_tensor(f, 1, x);
      for (int i = 0; i < n; ++i) {
        auto hi = x;
        auto lo = x;
        if (!x[i]) hi = flip(x, i);
        else lo = flip(x, i);
        const std::vector<int> idx = {i};
        CHECK(grad.at(idx) == doctest::Approx(f.evaluate(hi) - f.evaluate(lo)));
      }
      const auto h3 = derivative_tensor(f, 3, x);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) {
            const std::vector<int> ijk = {i, j, k};
            const std::vector<int> kji = {k, j, i};
            const std::vector<int> jik = {j, i, k};
            CHECK(h3.at(ijk) == h3.at(kji));
            CHECK(h3.at(ijk) == h3.at(jik));
            if (i == j || j == k || i == k) CHECK(h3.at(ijk) == 0.0);
          }
        }
      }
    }
  }
}

TEST_CASE("mean derivative") {
  const auto pi = to_table(CondBernoulli({0.2, 0.5, 0.7, 0.4, 0.6}, 2));
  const TetrahedralPolynomial linear(5, {{1, 2.0}, {4, -1.0}, {16, 0.5}});
  const auto m = mean_derivative(pi, linear, 1);
  const std::vector<double> expect = {2.0, 0.0, -1.0, 0.0, 0.5};
  for (int i = 0; i < 5; ++i) CHECK(m.at(std::vector<int>{i}) == doctest::Approx(expect[static_cast<std::size_t>(i)]));

  RandomStream rng(74);
  const auto f = random_poly(5, 3, rng);
  const auto top = mean_derivative(pi, f, 3);
  const auto at = derivative_tensor(f, 3, pi.support[0]);
  for (std::size_t i = 0; i < top.size(); ++i) CHECK(top.data()[i] == doctest::Approx(at.data()[i]));

  // Monte Carlo average of one second-order entry.
  const auto m2 = mean_derivative(pi, f, 2);
  const std::vector<int> idx = {0, 3};
  const CondBernoulli spec({0.2, 0.5, 0.7, 0.4, 0.6}, 2);
  const int draws = 100000;
  double s = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double v = derivative_tensor(f, 2, sample(spec, rng)).at(idx);
    s += v;
    s2 += v * v;
  }
  const double mean = s / draws;
  const double sd = std::sqrt(std::max(0.0, s2 / draws - mean * mean) / draws);
  CHECK(std::abs(mean - m2.at(idx)) <= 4 * sd + 1e-12);
}

TEST_CASE("partitions") {
  CHECK(partitions(1).size() == 1);
  CHECK(partition_to_string(partitions(1)[0]) == "{1}");
  const auto two = partitions(2);
  REQUIRE(two.size() == 2);
  std::vector<std::string> names;
  for (const auto& p : two) names.push_back(partition_to_string(p));
  CHECK(std::find(names.begin(), names.end(), "{1,2}") != names.end());
  CHECK(std::find(names.begin(), names.end(), "{1}{2}") != names.end());
  CHECK(partitions(3).size() == 5);
  CHECK(partitions(4).size() == 15);
  CHECK(partitions(5).size() == 52);
  CHECK(partitions(6).size() == 203);
  CHECK_THROWS(partitions(0));
  CHECK_THROWS(partitions(7));
}

TEST_CASE("injective norms") {
  IndexTensor id(2, 2);
  id.at(std::vector<int>{0, 0}) = 1.0;
  id.at(std::vector<int>{1, 1}) = 1.0;
  const Partition split = {{0}, {1}};
  const Partition whole = {{0, 1}};
  CHECK(injective_norm(id, split).value == doctest::Approx(1.0));
  CHECK(injective_norm(id, whole).value == doctest::Approx(std::sqrt(2.0)));
  CHECK(injective_norm(id, whole).method == "closed-form");

  IndexTensor single(3, 3);
  single.at(std::vector<int>{0, 1, 2}) = 5.0;
  for (const auto& j : partitions(3)) CHECK(injective_norm(single, j).value == doctest::Approx(5.0).epsilon(1e-9));

  const Partition bad = {{0}};
  CHECK_THROWS(injective_norm(id, bad));

  NormOptions certified;
  certified.mode = NormMode::certified;
  const Partition three = {{0}, {1}, {2}};
  RandomStream rng(75);
  const auto t = random_tensor(3, 3, rng);
  const auto r = injective_norm(t, three, certified);
  CHECK(r.method == "grid-checked");
}

TEST_CASE("norm value bounds every feasible evaluation") {
  RandomStream rng(76);
  for (int trial = 0; trial < 5; ++trial) {
    const auto t = random_tensor(3, 4, rng);
    for (const auto& j : partitions(3)) {
      const double v = injective_norm(t, j).value;
      for (int s = 0; s < 200; ++s) {
        std::vector<std::vector<double>> vecs;
        for (const auto& block : j) vecs.push_back(unit_vector(block_size(4, block), rng));
        CHECK(std::abs(multilinear_form(t, j, vecs)) <= v + 1e-9);
      }
    }
  }
}

TEST_CASE("norm axioms") {
  RandomStream rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_tensor(3, 3, rng);
    const auto b = random_tensor(3, 3, rng);
    IndexTensor sum(3, 3);
    IndexTensor scaled(3, 3);
    const double c = -2.5;
    for (std::size_t i = 0; i < a.size(); ++i) {
      sum.data()[i] = a.data()[i] + b.data()[i];
      scaled.data()[i] = c * a.data()[i];
    }
    for (const auto& j : partitions(3)) {
      const double na = injective_norm(a, j).value;
      CHECK(injective_norm(scaled, j).value == doctest::Approx(std::abs(c) * na).epsilon(1e-8));
      CHECK(injective_norm(sum, j).value <= na + injective_norm(b, j).value + 1e-8);
    }
  }
}

TEST_CASE("polynomial tail bound") {
  const auto pi = to_table(CondBernoulli({0.2, 0.5, 0.7, 0.4}, 2));
  const TetrahedralPolynomial linear(4, {{1, 3.0}, {2, 4.0}});
  CHECK(thm38_exponent(pi, linear, 0.0, 2.0, 1.0) == 2.0);
  const auto norms = polynomial_norms(pi, linear);
  REQUIRE(norms.size() == 1);
  CHECK(norms[0].norm == doctest::Approx(5.0));
  const double t = 3.0;
  const double cd = 1.7;
  const auto b = thm38_bound(norms, t, 2.0, cd);
  CHECK(b.exponent == doctest::Approx(std::pow(t / (std::sqrt(2.0) * 5.0), 2.0)));
  CHECK(b.bound == doctest::Approx(2.0 * std::exp(-b.exponent / cd)));
  CHECK(thm38_exponent(pi, linear, t, 2.0, cd) == doctest::Approx(b.bound));
  CHECK_THROWS(thm38_exponent(pi, TetrahedralPolynomial(4, {{0, 1.0}}), 1.0, 2.0, 1.0));

  // Larger R or larger norms give a larger bound.
  CHECK(thm38_exponent(pi, linear, t, 3.0, cd) >= b.bound);
  const TetrahedralPolynomial steeper(4, {{1, 6.0}, {2, 8.0}});
  CHECK(thm38_exponent(pi, steeper, t, 2.0, cd) >= b.bound);

  CHECK(required_cd(1.0, 0.0) == 0.0);
  CHECK(required_cd(2.0, 2.0 * std::exp(-1.0)) == doctest::Approx(2.0));
  CHECK(2.0 * std::exp(-2.0 / required_cd(2.0, 0.3)) == doctest::Approx(0.3));
}
