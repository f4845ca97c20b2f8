#pragma once

// Tail reports: empirical or exact tails on a t-grid next to theoretical bounds.

#include <cstdint>
#include <string>
#include <vector>

namespace negdep::lab {

inline constexpr double kRowSignificance = 1e-4;

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

/// Two-sided Clopper-Pearson interval with coverage 1 - significance.
Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double significance = kRowSignificance);

struct BoundColumn {
  std::string name;  // e.g. "thm22_bound"
  std::string source;
  std::vector<double> values;  // one per t
};

struct TailRow {
  double t = 0.0;
  double empirical = 0.0;
  Interval ci;         // equals [empirical, empirical] for exact tails
  bool dominated = true;  // every bound >= the upper CI (or the exact tail)
  bool refuted = false;   // some bound < the lower CI
};

struct TailReport {
  std::string statistic;  // what the tail is of
  bool exact = true;
  std::uint64_t trials = 0;
  std::vector<TailRow> rows;
  std::vector<BoundColumn> bounds;

  /// Fills the dominance flags of every row from the bound columns.
  void assess();
  bool all_dominated() const;
};

/// Fixed 17 significant digits.
std::string format_double(double v);

std::string tail_csv(const TailReport& r);
std::string tail_json(const TailReport& r);

/// Joins rows of cells into CSV text with a header.
std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

void write_file(const std::string& path, const std::string& text);

}  // namespace negdep::lab
