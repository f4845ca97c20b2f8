#include "negdep/lab/report.hpp"

#include <boost/math/distributions/beta.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace negdep::lab {

Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double significance) {
  if (trials == 0 || successes > trials) throw std::invalid_argument("need 0 <= successes <= trials, trials >= 1");
  if (!(significance > 0.0 && significance < 1.0)) throw std::invalid_argument("significance must lie in (0,1)");
  const auto x = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  Interval out;
  if (successes > 0) {
    out.low = boost::math::quantile(boost::math::beta_distribution<>(x, n - x + 1.0), significance / 2.0);
  }
  if (successes < trials) {
    out.high = boost::math::quantile(boost::math::beta_distribution<>(x + 1.0, n - x), 1.0 - significance / 2.0);
  }
  return out;
}

void TailReport::assess() {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& row = rows[i];
    row.dominated = true;
    row.refuted = false;
    for (const auto& b : bounds) {
      const double v = b.values.at(i);
      if (v < row.ci.high) row.dominated = false;
      if (v < row.ci.low) row.refuted = true;
    }
  }
}

bool TailReport::all_dominated() const {
  for (const auto& row : rows) {
    if (!row.dominated) return false;
  }
  return true;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out.str();
}

std::string tail_csv(const TailReport& r) {
  std::vector<std::string> header = {"t", "empirical", "ci_low", "ci_high"};
  for (const auto& b : r.bounds) header.push_back(b.name);
  header.push_back("dominated");
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    std::vector<std::string> cells = {format_double(row.t), format_double(row.empirical), format_double(row.ci.low),
                                      format_double(row.ci.high)};
    for (const auto& b : r.bounds) cells.push_back(format_double(b.values[i]));
    cells.push_back(row.dominated ? "1" : "0");
    rows.push_back(std::move(cells));
  }
  std::ostringstream out;
  out << "# statistic: " << r.statistic << '\n';
  if (r.exact) {
    out << "# exact tails by enumeration\n";
  } else {
    out << "# Monte Carlo, " << r.trials << " trials, Clopper-Pearson per row at significance "
        << format_double(kRowSignificance) << " (Bonferroni over " << r.rows.size() << " rows: "
        << format_double(kRowSignificance * static_cast<double>(r.rows.size())) << ")\n";
  }
  for (const auto& b : r.bounds) out << "# " << b.name << ": " << b.source << '\n';
  out << csv(header, rows);
  return out.str();
}

std::string tail_json(const TailReport& r) {
  nlohmann::ordered_json j;
  j["statistic"] = r.statistic;
  j["exact"] = r.exact;
  j["trials"] = r.trials;
  j["all_dominated"] = r.all_dominated();
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    nlohmann::ordered_json e;
    e["t"] = format_double(row.t);
    e["empirical"] = format_double(row.empirical);
    e["ci_low"] = format_double(row.ci.low);
    e["ci_high"] = format_double(row.ci.high);
    for (const auto& b : r.bounds) e[b.name] = format_double(b.values[i]);
    e["dominated"] = row.dominated;
    e["refuted"] = row.refuted;
    rows.push_back(e);
  }
  j["rows"] = rows;
  auto sources = nlohmann::ordered_json::object();
  for (const auto& b : r.bounds) sources[b.name] = b.source;
  j["bound_sources"] = sources;
  return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace negdep::lab
