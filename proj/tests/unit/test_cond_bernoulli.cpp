#include "negdep/cond_bernoulli.hpp"
#include "negdep/random.hpp"

#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <map>

using namespace negdep;

namespace {

Rational q(long a, long b) { return Rational(a) / Rational(b); }

// Product measure restricted to the slice and renormalized.
std::map<std::uint64_t, Rational> brute_force(const std::vector<Rational>& p, int k) {
  const int n = static_cast<int>(p.size());
  std::map<std::uint64_t, Rational> out;
  Rational total = 0;
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
    if (std::popcount(b) != k) continue;
    Rational w = 1;
    for (int i = 0; i < n; ++i) w *= ((b >> i) & 1U) ? p[static_cast<std::size_t>(i)] : 1 - p[static_cast<std::size_t>(i)];
    out[b] = w;
    total += w;
  }
  for (auto& [b, w] : out) w /= total;
  return out;
}

std::vector<Rational> random_exact_p(int n, RandomStream& rng) {
  std::vector<Rational> p;
  for (int i = 0; i < n; ++i) p.push_back(q(static_cast<long>(1 + rng() % 19), 20));
  return p;
}

}  // namespace

TEST_CASE("poisson binomial") {
  const std::vector<Rational> half = {q(1, 2), q(1, 2)};
  CHECK(poisson_binomial<Rational>(half, 1) == q(1, 2));
  const std::vector<Rational> p = {q(1, 2), q(1, 3), q(1, 4)};
  CHECK(poisson_binomial<Rational>(p, 1) == q(11, 24));
  RandomStream rng(5);
  for (int n = 1; n <= 12; ++n) {
    const auto pr = random_exact_p(n, rng);
    Rational total = 0;
    for (int m = 0; m <= n; ++m) total += poisson_binomial<Rational>(pr, m);
    CHECK(total == 1);
  }
}

TEST_CASE("pmf on the slice") {
  const ExactCondBernoulli sym({q(1, 2), q(1, 2)}, 1);
  CHECK(pmf(sym, CubeState::parse("10")) == q(1, 2));
  CHECK(pmf(sym, CubeState::parse("01")) == q(1, 2));
  const ExactCondBernoulli s({q(1, 2), q(1, 3), q(1, 4)}, 1);
  CHECK(pmf(s, CubeState::parse("100")) == q(6, 11));
  CHECK(pmf(s, CubeState::parse("010")) == q(3, 11));
  CHECK(pmf(s, CubeState::parse("001")) == q(2, 11));
  CHECK(pmf(s, CubeState::parse("110")) == 0);
  CHECK_THROWS(CondBernoulli({0.0, 0.5}, 1));
  CHECK_THROWS(CondBernoulli({0.5, 0.5}, 3));
}

TEST_CASE("table matches the product-then-condition oracle") {
  RandomStream rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const int k = static_cast<int>(rng() % static_cast<std::uint64_t>(n + 1));
    const auto p = random_exact_p(n, rng);
    const auto table = to_table(ExactCondBernoulli(p, k));
    const auto oracle = brute_force(p, k);
    REQUIRE(table.size() == oracle.size());
    Rational total = 0;
    for (std::size_t x = 0; x < table.size(); ++x) {
      CHECK(table.probs[x] == oracle.at(table.support[x].bits()));
      total += table.probs[x];
    }
    CHECK(total == 1);
  }
  const auto t = to_table(CondBernoulli({0.5, 0.5}, 1));
  REQUIRE(t.size() == 2);
  CHECK(t.probs[0] == doctest::Approx(0.5));
}

TEST_CASE("float table sums to one") {
  RandomStream rng(7);
  for (int n = 1; n <= 12; ++n) {
    std::vector<double> p;
    for (int i = 0; i < n; ++i) p.push_back(0.05 + 0.9 * rng.uniform());
    const auto t = to_table(CondBernoulli(p, n / 2));
    double total = 0.0;
    for (double v : t.probs) total += v;
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
}

TEST_CASE("inclusion probabilities") {
  const ExactCondBernoulli s({q(1, 2), q(1, 3), q(1, 4)}, 1);
  CHECK(inclusion_probability(s, 0) == q(6, 11));
  RandomStream rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const int k = static_cast<int>(rng() % static_cast<std::uint64_t>(n + 1));
    const ExactCondBernoulli spec(random_exact_p(n, rng), k);
    Rational total = 0;
    for (int i = 0; i < n; ++i) total += inclusion_probability(spec, i);
    CHECK(total == k);
  }
  const ExactCondBernoulli uniform(std::vector<Rational>(6, q(2, 7)), 4);
  for (int i = 0; i < 6; ++i) CHECK(inclusion_probability(uniform, i) == q(4, 6));
}

TEST_CASE("conditioning commutes with restriction") {
  RandomStream rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n - 1));
    const auto p = random_exact_p(n, rng);
    const ExactCondBernoulli spec(p, k);
    const auto full = to_table(spec);
    const int l = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    const int bit = static_cast<int>(rng() & 1U);
    const std::vector<int> coords = {l};
    const std::vector<int> values = {bit};
    const auto cond = condition(spec, coords, values);
    CHECK(cond.n() == n - 1);
    CHECK(cond.k() == k - bit);
    const auto table = to_table(cond);
    Rational mass = 0;
    for (std::size_t x = 0; x < full.size(); ++x) {
      if (full.support[x][l] == static_cast<bool>(bit)) mass += full.probs[x];
    }
    for (std::size_t x = 0; x < full.size(); ++x) {
      if (full.support[x][l] != static_cast<bool>(bit)) continue;
      const auto reduced = remove_coordinate(full.support[x], l);
      const auto j = table.index_of(reduced);
      REQUIRE(j >= 0);
      CHECK(table.probs[static_cast<std::size_t>(j)] == full.probs[x] / mass);
    }
  }
}

TEST_CASE("sampler extremes") {
  RandomStream rng(10);
  const CondBernoulli zero({0.3, 0.6, 0.2}, 0);
  const CondBernoulli all({0.3, 0.6, 0.2}, 3);
  for (int i = 0; i < 100; ++i) {
    CHECK(sample(zero, rng).to_string() == "000");
    CHECK(sample(all, rng).to_string() == "111");
  }
}

TEST_CASE("sampler frequencies within 4 sigma") {
  const CondBernoulli s({0.5, 1.0 / 3.0, 0.25}, 1);
  RandomStream rng(11);
  std::map<std::string, int> counts;
  const int draws = 1000000;
  for (int i = 0; i < draws; ++i) ++counts[sample(s, rng).to_string()];
  const std::map<std::string, double> expected = {{"100", 6.0 / 11}, {"010", 3.0 / 11}, {"001", 2.0 / 11}};
  for (const auto& [state, prob] : expected) {
    const double sigma = std::sqrt(prob * (1 - prob) / draws);
    CHECK(std::abs(counts[state] / static_cast<double>(draws) - prob) < 4 * sigma);
  }
}

TEST_CASE("sampler passes chi-square goodness of fit") {
  RandomStream rng(12);
  for (int trial = 0; trial < 3; ++trial) {
    const int n = 6 + trial;
    std::vector<double> p;
    for (int i = 0; i < n; ++i) p.push_back(0.1 + 0.8 * rng.uniform());
    const CondBernoulli spec(p, n / 2);
    const auto table = to_table(spec);
    std::vector<double> counts(table.size(), 0.0);
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) ++counts[static_cast<std::size_t>(table.index_of(sample(spec, rng)))];
    double chi2 = 0.0;
    for (std::size_t x = 0; x < table.size(); ++x) {
      const double e = draws * table.probs[x];
      chi2 += (counts[x] - e) * (counts[x] - e) / e;
    }
    const boost::math::chi_squared dist(static_cast<double>(table.size() - 1));
    CHECK(boost::math::cdf(boost::math::complement(dist, chi2)) > 1e-4);
  }
}

TEST_CASE("json round trip") {
  const CondBernoulli s({0.25, 0.5, 0.75}, 2);
  const auto back = spec_from_json(spec_to_json(s));
  CHECK(back.k() == 2);
  CHECK(back.p() == s.p());
  const auto exact = exact_spec_from_json(R"({"p": ["1/3", 0.5], "k": 1})");
  CHECK(exact.p()[0] == q(1, 3));
  CHECK_THROWS(spec_from_json(R"({"p": [0.5], "k": 2})"));
}
