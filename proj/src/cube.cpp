#include "negdep/cube.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace negdep {

namespace {

std::uint64_t low_mask(int n) {
  return n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
}

void require_same_length(const CubeState& x, const CubeState& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("cube states have different lengths");
  }
}

void require_index(const CubeState& x, int i) {
  if (i < 0 || i >= x.size()) {
    throw std::out_of_range("coordinate index " + std::to_string(i) + " outside [0," +
                            std::to_string(x.size()) + ")");
  }
}

}  // namespace

CubeState::CubeState(int n) : CubeState(n, 0) {}

CubeState::CubeState(int n, std::uint64_t bits) : n_(n), bits_(bits) {
  if (n < 0 || n > kMaxCubeDim) {
    throw std::invalid_argument("cube dimension " + std::to_string(n) + " outside [0,63]");
  }
  if ((bits & ~low_mask(n)) != 0) {
    throw std::invalid_argument("bits set beyond the cube dimension");
  }
}

CubeState CubeState::parse(std::string_view s) {
  if (s.size() > static_cast<std::size_t>(kMaxCubeDim)) {
    throw std::invalid_argument("state string longer than 63 coordinates");
  }
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1') {
      bits |= std::uint64_t{1} << i;
    } else if (s[i] != '0') {
      throw std::invalid_argument("state string must contain only 0 and 1");
    }
  }
  return CubeState(static_cast<int>(s.size()), bits);
}

int CubeState::ones() const { return std::popcount(bits_); }

std::string CubeState::to_string() const {
  std::string s(static_cast<std::size_t>(n_), '0');
  for (int i = 0; i < n_; ++i) {
    if ((*this)[i]) s[static_cast<std::size_t>(i)] = '1';
  }
  return s;
}

bool operator<(const CubeState& a, const CubeState& b) {
  const int m = std::min(a.size(), b.size());
  for (int i = 0; i < m; ++i) {
    if (a[i] != b[i]) return b[i];
  }
  return a.size() < b.size();
}

WeightVector::WeightVector(std::vector<double> alpha) : alpha_(std::move(alpha)) {
  for (double a : alpha_) {
    if (!(a >= 0.0)) throw std::invalid_argument("weights must be nonnegative");
  }
}

double WeightVector::squared_norm() const {
  return std::transform_reduce(alpha_.begin(), alpha_.end(), 0.0, std::plus<>{},
                               [](double a) { return a * a; });
}

double WeightVector::top_squared_sum(std::size_t m) const {
  std::vector<double> sorted = rearrange_nonincreasing(*this).alpha_;
  m = std::min(m, sorted.size());
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) s += sorted[i] * sorted[i];
  return s;
}

int hamming(const CubeState& x, const CubeState& y) {
  require_same_length(x, y);
  return std::popcount(x.bits() ^ y.bits());
}

double weighted_hamming(const WeightVector& alpha, const CubeState& x, const CubeState& y) {
  require_same_length(x, y);
  if (alpha.size() != static_cast<std::size_t>(x.size())) {
    throw std::invalid_argument("weight vector length does not match the states");
  }
  double d = 0.0;
  std::uint64_t diff = x.bits() ^ y.bits();
  while (diff != 0) {
    const int i = std::countr_zero(diff);
    d += alpha[static_cast<std::size_t>(i)];
    diff &= diff - 1;
  }
  return d;
}

CubeState flip(const CubeState& x, int i) {
  require_index(x, i);
  return CubeState(x.size(), x.bits() ^ (std::uint64_t{1} << i));
}

CubeState swap(const CubeState& x, int i, int j) {
  require_index(x, i);
  require_index(x, j);
  if (x[i] == x[j]) return x;
  return CubeState(x.size(), x.bits() ^ (std::uint64_t{1} << i) ^ (std::uint64_t{1} << j));
}

bool covers(const CubeState& x, const CubeState& y) {
  require_same_length(x, y);
  if (x == y) return true;
  const std::uint64_t diff = x.bits() ^ y.bits();
  return std::popcount(diff) == 1 && (x.bits() & diff) != 0;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return c;
}

std::vector<CubeState> enumerate_slice(int n, int k) {
  if (n < 0 || n > kMaxEnumerationDim) {
    throw std::invalid_argument("enumeration limited to n <= 24");
  }
  if (k < 0 || k > n) {
    throw std::invalid_argument("slice level k=" + std::to_string(k) + " outside [0," +
                                std::to_string(n) + "]");
  }
  std::vector<CubeState> out;
  out.reserve(binomial(n, k));
  // Depth-first over coordinates, trying 0 before 1, gives ascending string order.
  std::function<void(int, int, std::uint64_t)> rec = [&](int i, int left, std::uint64_t bits) {
    if (left == 0) {
      out.emplace_back(n, bits);
      return;
    }
    if (n - i == left) {
      out.emplace_back(n, bits | (low_mask(n) & ~low_mask(i)));
      return;
    }
    rec(i + 1, left, bits);
    rec(i + 1, left - 1, bits | (std::uint64_t{1} << i));
  };
  rec(0, k, 0);
  return out;
}

std::vector<CubeState> enumerate_cube(int n) {
  if (n < 0 || n > kMaxEnumerationDim) {
    throw std::invalid_argument("enumeration limited to n <= 24");
  }
  std::vector<CubeState> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) out.emplace_back(n, b);
  return out;
}

WeightVector rearrange_nonincreasing(const WeightVector& alpha) {
  std::vector<double> v(alpha.values().begin(), alpha.values().end());
  std::sort(v.begin(), v.end(), std::greater<>{});
  return WeightVector(std::move(v));
}

CubeState remove_coordinate(const CubeState& x, int l) {
  require_index(x, l);
  const std::uint64_t lo = x.bits() & low_mask(l);
  const std::uint64_t hi = (x.bits() >> (l + 1)) << l;
  return CubeState(x.size() - 1, lo | hi);
}

CubeState insert_coordinate(const CubeState& x, int l, bool bit) {
  if (l < 0 || l > x.size()) throw std::out_of_range("insert position out of range");
  const std::uint64_t lo = x.bits() & low_mask(l);
  const std::uint64_t hi = (x.bits() >> l) << (l + 1);
  return CubeState(x.size() + 1, lo | hi | (bit ? std::uint64_t{1} << l : 0));
}

CubeState concat(const CubeState& lo, const CubeState& hi) {
  return CubeState(lo.size() + hi.size(), lo.bits() | (hi.bits() << lo.size()));
}

StateIndex::StateIndex(std::span<const CubeState> states) {
  if (!states.empty()) n_ = states.front().size();
  pos_.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].size() != n_) throw std::invalid_argument("indexed states differ in length");
    if (!pos_.emplace(states[i].bits(), i).second) {
      throw std::invalid_argument("indexed states are not distinct");
    }
  }
}

std::ptrdiff_t StateIndex::find(const CubeState& x) const {
  if (x.size() != n_) return -1;
  const auto it = pos_.find(x.bits());
  return it == pos_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::size_t StateIndex::at(const CubeState& x) const {
  const auto i = find(x);
  if (i < 0) throw std::out_of_range("state " + x.to_string() + " not in index");
  return static_cast<std::size_t>(i);
}

}  // namespace negdep
