#pragma once

// State-space primitives on the discrete cube {0,1}^n.
//
// Coordinates are 0-based in the API. Coordinate i is stored in bit i of the
// packed word, and the string form lists coordinate 0 first ("100" has only
// coordinate 0 set).

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace negdep {

inline constexpr int kMaxCubeDim = 63;
inline constexpr int kMaxEnumerationDim = 24;

class CubeState {
 public:
  CubeState() = default;
  /// All-zeros state of length n.
  explicit CubeState(int n);
  CubeState(int n, std::uint64_t bits);

  static CubeState parse(std::string_view s);

  int size() const { return n_; }
  std::uint64_t bits() const { return bits_; }
  bool operator[](int i) const { return (bits_ >> i) & 1U; }
  int ones() const;

  std::string to_string() const;

  friend bool operator==(const CubeState&, const CubeState&) = default;
  /// Lexicographic order of the string form.
  friend bool operator<(const CubeState& a, const CubeState& b);

 private:
  int n_ = 0;
  std::uint64_t bits_ = 0;
};

struct CubeStateHash {
  std::size_t operator()(const CubeState& x) const noexcept {
    return std::hash<std::uint64_t>{}(x.bits() ^ (std::uint64_t(x.size()) << 58));
  }
};

/// Nonnegative coordinate weights (the alpha of a weighted Hamming distance).
class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(std::vector<double> alpha);

  std::size_t size() const { return alpha_.size(); }
  double operator[](std::size_t i) const { return alpha_[i]; }
  std::span<const double> values() const { return alpha_; }
  double squared_norm() const;
  /// Sum of the m largest squared weights.
  double top_squared_sum(std::size_t m) const;

 private:
  std::vector<double> alpha_;
};

/// kappa(x): number of coordinates equal to one.
inline int kappa(const CubeState& x) { return x.ones(); }

int hamming(const CubeState& x, const CubeState& y);
double weighted_hamming(const WeightVector& alpha, const CubeState& x, const CubeState& y);

CubeState flip(const CubeState& x, int i);
CubeState swap(const CubeState& x, int i, int j);

/// x covers y: x == y or x == y + e_i for some i.
bool covers(const CubeState& x, const CubeState& y);

/// All states of length n with exactly k ones, in ascending lexicographic
/// order of their string form.
std::vector<CubeState> enumerate_slice(int n, int k);
/// All 2^n states, ordered by packed value.
std::vector<CubeState> enumerate_cube(int n);

WeightVector rearrange_nonincreasing(const WeightVector& alpha);

/// Drops coordinate l, shifting higher coordinates down by one.
CubeState remove_coordinate(const CubeState& x, int l);
/// Inverse of remove_coordinate: inserts `bit` at position l.
CubeState insert_coordinate(const CubeState& x, int l, bool bit);
/// Concatenation; coordinates of `lo` come first.
CubeState concat(const CubeState& lo, const CubeState& hi);

std::uint64_t binomial(int n, int k);

/// Position lookup for an ordered list of states.
class StateIndex {
 public:
  StateIndex() = default;
  explicit StateIndex(std::span<const CubeState> states);

  /// Index of x, or -1 if absent.
  std::ptrdiff_t find(const CubeState& x) const;
  std::size_t at(const CubeState& x) const;

 private:
  std::unordered_map<std::uint64_t, std::size_t> pos_;
  int n_ = 0;
};

}  // namespace negdep
