#include "negdep/lab/experiments.hpp"

#include "negdep/coupling.hpp"
#include "negdep/functional.hpp"
#include "negdep/generator.hpp"
#include "negdep/martingale.hpp"
#include "negdep/parallel.hpp"
#include "negdep/talagrand.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace negdep::lab {

std::vector<double> random_p(int n, RandomStream& rng) {
  std::vector<double> p(static_cast<std::size_t>(n));
  for (auto& v : p) v = 0.05 + 0.9 * rng.uniform();
  return p;
}

WeightVector random_alpha(int n, RandomStream& rng) {
  std::vector<double> a(static_cast<std::size_t>(n));
  for (auto& v : a) v = 0.1 + 0.9 * rng.uniform();
  std::sort(a.begin(), a.end(), std::greater<>{});
  return WeightVector(std::move(a));
}

double InfConvolution::operator()(const CubeState& x) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < anchors.size(); ++j) {
    best = std::min(best, offsets[j] + weighted_hamming(alpha, x, anchors[j]));
  }
  return best;
}

InfConvolution random_inf_convolution(const WeightVector& alpha, int anchors, RandomStream& rng) {
  if (anchors < 1) throw std::invalid_argument("need at least one anchor");
  const int n = static_cast<int>(alpha.size());
  InfConvolution f;
  f.alpha = alpha;
  double total = 0.0;
  for (double a : alpha.values()) total += a;
  for (int j = 0; j < anchors; ++j) {
    f.anchors.emplace_back(n, rng() & ((std::uint64_t{1} << n) - 1));
    f.offsets.push_back(total * rng.uniform());
  }
  return f;
}

Hermitian random_hermitian(int d, double scale, RandomStream& rng) {
  std::normal_distribution<double> gauss;
  Hermitian a(d, d);
  for (int r = 0; r < d; ++r) {
    a(r, r) = {gauss(rng), 0.0};
    for (int c = r + 1; c < d; ++c) {
      a(r, c) = {gauss(rng) / std::sqrt(2.0), gauss(rng) / std::sqrt(2.0)};
      a(c, r) = std::conj(a(r, c));
    }
  }
  const double norm = op_norm(a);
  return norm > 0.0 ? Hermitian(a * (scale / norm)) : a;
}

Hermitian random_psd(int d, double scale, RandomStream& rng) {
  const Hermitian h = random_hermitian(d, 1.0, rng);
  Hermitian s = square(h);
  const double norm = op_norm(s);
  return norm > 0.0 ? Hermitian(s * (scale / norm)) : s;
}

Hermitian MatrixFunction::operator()(const CubeState& x) const {
  Hermitian out = Hermitian::Zero(d, d);
  for (int i = 0; i < n; ++i) {
    if (x[i]) out += a[static_cast<std::size_t>(i)];
  }
  if (scalar) out += (*scalar)(x) * Hermitian::Identity(d, d);
  return out;
}

std::vector<Hermitian> MatrixFunction::certified_c() const {
  std::vector<Hermitian> c;
  for (int i = 0; i < n; ++i) {
    Hermitian m = abs_matrix(a[static_cast<std::size_t>(i)]);
    if (scalar) m += scalar->alpha[static_cast<std::size_t>(i)] * Hermitian::Identity(d, d);
    c.push_back(m);
  }
  return c;
}

WeightVector MatrixFunction::lipschitz_alpha() const {
  std::vector<double> alpha;
  for (int i = 0; i < n; ++i) {
    alpha.push_back(op_norm(a[static_cast<std::size_t>(i)]) + (scalar ? scalar->alpha[static_cast<std::size_t>(i)] : 0.0));
  }
  return WeightVector(std::move(alpha));
}

bool MatrixFunction::linear_psd() const {
  if (scalar) return false;
  for (const auto& m : a) {
    if (lambda_min(m) < -1e-12) return false;
  }
  return true;
}

MatrixFunction random_matrix_function(int n, int d, const std::string& type, RandomStream& rng) {
  MatrixFunction f;
  f.n = n;
  f.d = d;
  for (int i = 0; i < n; ++i) {
    const double scale = 0.2 + 0.8 * rng.uniform();
    f.a.push_back(type == "linear-psd" ? random_psd(d, scale, rng) : random_hermitian(d, scale, rng));
  }
  if (type == "linear-plus-scalar") {
    std::vector<double> beta(static_cast<std::size_t>(n));
    for (auto& b : beta) b = 0.3 * rng.uniform();
    f.scalar = random_inf_convolution(WeightVector(beta), 3, rng);
  } else if (type != "linear" && type != "linear-psd") {
    throw std::invalid_argument("unknown matrix function type '" + type + "'");
  }
  return f;
}

TetrahedralPolynomial random_polynomial(int n, int degree, RandomStream& rng) {
  if (degree < 1 || degree > n) throw std::invalid_argument("degree must lie in [1, n]");
  TetrahedralPolynomial f(n);
  std::normal_distribution<double> gauss;
  for (int r = 1; r <= degree; ++r) {
    const int terms = r == degree ? 3 : 2;
    for (int t = 0; t < terms; ++t) {
      std::uint64_t s = 0;
      while (std::popcount(s) < r) s |= std::uint64_t{1} << (rng() % static_cast<std::uint64_t>(n));
      f.set(s, f.coeff(s) + gauss(rng));
    }
  }
  return f;
}

TailReport exhaustive_tail(std::span<const double> probs, std::span<const double> stat, std::span<const double> t_grid,
                           bool inclusive) {
  if (probs.size() != stat.size()) throw std::invalid_argument("probabilities and statistics differ in length");
  TailReport r;
  r.exact = true;
  for (double t : t_grid) {
    double mass = 0.0;
    for (std::size_t x = 0; x < probs.size(); ++x) {
      if (inclusive ? stat[x] >= t : stat[x] > t) mass += probs[x];
    }
    mass = std::clamp(mass, 0.0, 1.0);
    r.rows.push_back({t, mass, {mass, mass}, true, false});
  }
  return r;
}

TailReport mc_tail(const std::function<double(RandomStream&)>& draw, std::span<const double> t_grid,
                   std::uint64_t trials, std::uint64_t seed, bool inclusive) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  // Fixed chunking, so counts do not depend on the worker count.
  const std::uint64_t chunk = 4096;
  const std::uint64_t chunks = (trials + chunk - 1) / chunk;
  std::vector<std::vector<std::uint64_t>> counts(chunks, std::vector<std::uint64_t>(t_grid.size(), 0));
  parallel_for(chunks, [&](std::size_t c) {
    const std::uint64_t begin = c * chunk;
    const std::uint64_t end = std::min(trials, begin + chunk);
    for (std::uint64_t i = begin; i < end; ++i) {
      RandomStream rng = RandomStream::derive(seed, i);
      const double v = draw(rng);
      for (std::size_t j = 0; j < t_grid.size(); ++j) {
        if (inclusive ? v >= t_grid[j] : v > t_grid[j]) ++counts[c][j];
      }
    }
  });
  TailReport r;
  r.exact = false;
  r.trials = trials;
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    std::uint64_t hits = 0;
    for (const auto& row : counts) hits += row[j];
    const double emp = static_cast<double>(hits) / static_cast<double>(trials);
    r.rows.push_back({t_grid[j], emp, clopper_pearson(hits, trials), true, false});
  }
  return r;
}

double median(std::span<const double> probs, std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  double acc = 0.0;
  for (auto i : order) {
    acc += probs[i];
    if (acc >= 0.5 - 1e-15) return values[i];
  }
  return values[order.back()];
}

namespace {

struct Context {
  const ExperimentConfig& config;
  RandomStream rng;
  std::vector<double> p;
  WeightVector alpha;
  DistributionTable<double> pi;
  RunResult result;
  nlohmann::ordered_json summary;

  explicit Context(const ExperimentConfig& c)
      : config(c), rng(RandomStream::derive(c.seed, 0xC0FFEE)), p(c.p) {
    if (p.empty()) p = random_p(c.n, rng);
    alpha = c.alpha.empty() ? random_alpha(c.n, rng) : WeightVector(c.alpha);
    summary["kind"] = kind_name(c.kind);
    summary["seed"] = c.seed;
    summary["n"] = c.n;
    summary["k"] = c.k;
    auto pj = nlohmann::ordered_json::array();
    for (double v : p) pj.push_back(format_double(v));
    summary["p"] = pj;
  }

  const DistributionTable<double>& table() {
    if (pi.size() == 0) {
      if (config.n > kMaxEnumerationDim) throw std::invalid_argument("support too large to enumerate");
      pi = to_table(CondBernoulli(p, config.k));
    }
    return pi;
  }

  std::string path(const std::string& suffix) const { return config.out_dir + "/" + config.prefix + suffix; }

  void emit(const std::string& suffix, const std::string& text) {
    write_file(path(suffix), text);
    result.files.push_back(path(suffix));
  }

  void fail_if(bool bad, const std::string& what) {
    if (bad) {
      result.exit_code = 1;
      summary["failures"].push_back(what);
    }
  }

  RunResult finish() {
    summary["pass"] = result.exit_code == 0;
    emit(".json", summary.dump(2) + "\n");
    result.summary = std::string(kind_name(config.kind)) + (result.exit_code == 0 ? " PASS" : " FAIL");
    return result;
  }
};

std::vector<double> default_grid(double top, int count = 24) {
  if (!(top > 0.0)) top = 1.0;
  std::vector<double> g;
  for (int i = 1; i <= count; ++i) g.push_back(top * i / count);
  return g;
}

void attach_report(Context& ctx, TailReport& report) {
  report.assess();
  ctx.emit(".csv", tail_csv(report));
  ctx.summary["tails"] = nlohmann::ordered_json::parse(tail_json(report));
  ctx.fail_if(!report.all_dominated(), "a bound fell below the tail");
}

// Scalar d_alpha-Lipschitz tails against the sub-Gaussian bound.
void lipschitz_tail(Context& ctx) {
  const auto& c = ctx.config;
  const auto type = c.function.value("type", std::string("inf-convolution"));
  std::function<double(const CubeState&)> f;
  if (type == "inf-convolution") {
    f = random_inf_convolution(ctx.alpha, c.function.value("anchors", 4), ctx.rng);
  } else if (type == "linear") {
    std::vector<double> coef;
    for (double a : ctx.alpha.values()) coef.push_back(ctx.rng.uniform() < 0.5 ? -a : a);
    f = [coef](const CubeState& x) {
      double s = 0.0;
      for (int i = 0; i < x.size(); ++i) s += x[i] ? coef[static_cast<std::size_t>(i)] : 0.0;
      return s;
    };
  } else {
    throw ConfigError("config field 'function.type': unknown scalar function '" + type + "'");
  }
  const auto& pi = ctx.table();
  std::vector<double> values;
  double mean = 0.0;
  for (std::size_t x = 0; x < pi.size(); ++x) {
    values.push_back(f(pi.support[x]));
    mean += pi.probs[x] * values.back();
  }
  std::vector<double> stat;
  for (double v : values) stat.push_back(v - mean);
  const auto grid = c.t_grid.empty() ? default_grid(*std::max_element(stat.begin(), stat.end())) : c.t_grid;
  TailReport report;
  if (c.exact) {
    report = exhaustive_tail(pi.probs, stat, grid);
  } else {
    const CondBernoulli spec(ctx.p, c.k);
    report = mc_tail([&](RandomStream& r) { return f(sample(spec, r)) - mean; }, grid, c.trials, c.seed);
  }
  report.statistic = "f(X) - pi(f), f " + type + " and 1-Lipschitz for d_alpha";
  BoundColumn b{"thm22_bound", "min of exp(-t^2/(8|alpha|^2)) and exp(-t^2/(16 sum_{i<=k} alpha_down^2))", {}};
  for (double t : grid) b.values.push_back(thm22_bound(ctx.alpha, t, c.k));
  report.bounds.push_back(b);
  attach_report(ctx, report);
}

void matrix_tail(Context& ctx) {
  const auto& c = ctx.config;
  const auto type = c.function.value("type", std::string("linear"));
  const auto f = random_matrix_function(c.n, c.matrix_dim, type, ctx.rng);
  const auto& pi = ctx.table();
  std::vector<Hermitian> values;
  Hermitian mean = Hermitian::Zero(c.matrix_dim, c.matrix_dim);
  for (std::size_t x = 0; x < pi.size(); ++x) {
    values.push_back(f(pi.support[x]));
    mean += pi.probs[x] * values.back();
  }
  std::vector<double> stat;
  for (const auto& v : values) stat.push_back(lambda_max(v - mean));
  const auto grid = c.t_grid.empty() ? default_grid(*std::max_element(stat.begin(), stat.end())) : c.t_grid;
  TailReport report;
  if (c.exact) {
    report = exhaustive_tail(pi.probs, stat, grid);
  } else {
    const CondBernoulli spec(ctx.p, c.k);
    report = mc_tail([&](RandomStream& r) { return lambda_max(f(sample(spec, r)) - mean); }, grid, c.trials, c.seed);
  }
  report.statistic = "lambda_max(f(X) - pi(f)), f " + type;
  const auto alpha = f.lipschitz_alpha();
  const auto cs = f.certified_c();
  BoundColumn b23{"thm23_bound", "d times min of exp(-t^2/(32|alpha|^2)) and exp(-t^2/(64 sum_{i<=k} alpha_down^2))", {}};
  for (double t : grid) b23.values.push_back(thm23_bound(c.matrix_dim, alpha, t, c.k));
  report.bounds.push_back(b23);
  const auto proxy = sigma_thm35(cs, c.k);
  if (proxy.value > 0.0) {
    BoundColumn b35{"thm35_bound", "d exp(-t^2/(sigma^2 + sigma t)), sigma^2 = 16 sup_{|I|=k} ||sum_I C_i^2||", {}};
    for (double t : grid) b35.values.push_back(thm35_bound(c.matrix_dim, std::sqrt(proxy.value), t));
    report.bounds.push_back(b35);
  }
  if (f.linear_psd() && c.k >= 1) {
    const CondBernoulli spec(ctx.p, c.k);
    Hermitian ftilde = Hermitian::Zero(c.matrix_dim, c.matrix_dim);
    double big_k = 0.0;
    for (int i = 0; i < c.n; ++i) {
      ftilde += inclusion_probability(spec, i) * square(f.a[static_cast<std::size_t>(i)]);
      big_k = std::max(big_k, op_norm(f.a[static_cast<std::size_t>(i)]));
    }
    BoundColumn b24{"thm24_bound", "d exp(-t^2/(8 ||pi(f~)|| log(ek) + (4/3) K t)), f = sum x_i C_i with C_i >= 0", {}};
    for (double t : grid) b24.values.push_back(thm24_bound(c.matrix_dim, op_norm(ftilde), big_k, c.k, t));
    report.bounds.push_back(b24);
  }
  if (c.k >= 1) {
    const auto cross = thm23_aoun_crossover(c.k, alpha.top_squared_sum(static_cast<std::size_t>(c.k)));
    ctx.summary["crossover"] = {{"closed_form", format_double(cross.closed_form)},
                                {"numeric", format_double(cross.numeric)}};
  }
  ctx.summary["sigma2"] = format_double(proxy.value);
  attach_report(ctx, report);
}

std::string set_id(const std::vector<bool>& members) {
  // Hex bitmask over support indices, most significant nibble first.
  std::string s;
  for (std::size_t hi = (members.size() + 3) / 4; hi-- > 0;) {
    int nib = 0;
    for (int b = 0; b < 4; ++b) {
      const std::size_t i = hi * 4 + static_cast<std::size_t>(b);
      if (i < members.size() && members[i]) nib |= 1 << b;
    }
    s += "0123456789abcdef"[nib];
  }
  return s;
}

void talagrand(Context& ctx) {
  const auto& c = ctx.config;
  const auto& pi = ctx.table();
  const std::size_t m = pi.size();
  std::vector<std::vector<bool>> sets;
  if (c.sets == "all") {
    if (m > 16) throw ConfigError("config field 'sets': 'all' needs a support of at most 16 states");
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
      std::vector<bool> s(m);
      for (std::size_t j = 0; j < m; ++j) s[j] = (mask >> j) & 1U;
      sets.push_back(std::move(s));
    }
  } else {
    for (std::uint64_t i = 0; i < c.set_count; ++i) {
      RandomStream r = RandomStream::derive(c.seed, i);
      const double q = r.uniform();
      std::vector<bool> s(m);
      bool any = false;
      for (std::size_t j = 0; j < m; ++j) any |= (s[j] = r.uniform() < q * q);
      if (!any) s[r() % m] = true;
      sets.push_back(std::move(s));
    }
  }
  struct Row {
    double measure, value, plain, gap;
  };
  std::vector<Row> rows(sets.size());
  parallel_for(sets.size(), [&](std::size_t i) {
    std::vector<CubeState> a;
    double measure = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (sets[i][j]) {
        a.push_back(pi.support[j]);
        measure += pi.probs[j];
      }
    }
    std::vector<double> sq;
    double gap = 0.0;
    for (const auto& x : pi.support) {
      const auto r = convex_distance(x, a);
      sq.push_back(r.squared);
      gap = std::max(gap, std::abs(r.gap));
    }
    const auto v = talagrand_from_squared(pi, measure, sq, c.divisor);
    rows[i] = {measure, v.value, v.plain, gap};
  });
  std::vector<std::vector<std::string>> cells;
  double worst = 0.0;
  double worst_gap = 0.0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    cells.push_back({set_id(sets[i]), format_double(rows[i].measure), format_double(rows[i].value),
                     format_double(rows[i].plain)});
    worst = std::max(worst, rows[i].value);
    worst_gap = std::max(worst_gap, rows[i].gap);
  }
  ctx.emit(".csv", csv({"set_id", "pi_A", "functional", "functional_without_exp"}, cells));
  ctx.summary["sets"] = sets.size();
  ctx.summary["divisor"] = format_double(c.divisor);
  ctx.summary["max_functional"] = format_double(worst);
  ctx.summary["max_gap"] = format_double(worst_gap);
  ctx.fail_if(worst > 1.0 + 1e-12, "functional above 1");
  ctx.fail_if(worst_gap >= 1e-9, "primal-dual gap above 1e-9");
}

TetrahedralPolynomial polynomial_from_config(Context& ctx) {
  const auto& fn = ctx.config.function;
  if (fn.contains("coeffs")) {
    TetrahedralPolynomial f(ctx.config.n);
    for (const auto& term : fn["coeffs"]) {
      std::uint64_t s = 0;
      for (int i : term.at("set").get<std::vector<int>>()) {
        if (i < 1 || i > ctx.config.n) throw ConfigError("config field 'function.coeffs': index out of range");
        s |= std::uint64_t{1} << (i - 1);
      }
      f.set(s, f.coeff(s) + term.at("value").get<double>());
    }
    return f;
  }
  return random_polynomial(ctx.config.n, ctx.config.degree, ctx.rng);
}

void polynomial_tail(Context& ctx) {
  const auto& c = ctx.config;
  const auto f = polynomial_from_config(ctx);
  const auto& pi = ctx.table();
  std::vector<double> values;
  double mean = 0.0;
  for (std::size_t x = 0; x < pi.size(); ++x) {
    values.push_back(f.evaluate(pi.support[x]));
    mean += pi.probs[x] * values.back();
  }
  std::vector<double> stat;
  for (double v : values) stat.push_back(std::abs(v - mean));
  const auto grid = c.t_grid.empty() ? default_grid(*std::max_element(stat.begin(), stat.end())) : c.t_grid;
  TailReport report;
  if (c.exact) {
    report = exhaustive_tail(pi.probs, stat, grid, true);
  } else {
    const CondBernoulli spec(ctx.p, c.k);
    report = mc_tail([&](RandomStream& r) { return std::abs(f.evaluate(sample(spec, r)) - mean); }, grid, c.trials,
                     c.seed, true);
  }
  report.statistic = "|f(X) - pi(f)| (two-sided, >= t), f tetrahedral of degree " + std::to_string(f.degree());
  NormOptions opt;
  opt.restarts = c.restarts;
  const auto norms = polynomial_norms(pi, f, opt);
  BoundColumn b{"thm38_bound",
                "2 exp(-(1/Cd) min_r min_J (t/(R^{r/2} ||pi nabla^r f||_J))^{2/|J|}), Cd = " + format_double(c.cd) +
                    ", R = " + format_double(c.R),
                {}};
  for (double t : grid) b.values.push_back(norms.empty() ? 2.0 : thm38_bound(norms, t, c.R, c.cd).bound);
  report.bounds.push_back(b);
  attach_report(ctx, report);
}

void norms(Context& ctx) {
  const auto f = polynomial_from_config(ctx);
  const auto& pi = ctx.table();
  NormOptions opt;
  opt.mode = NormMode::certified;
  opt.restarts = ctx.config.restarts;
  std::vector<std::vector<std::string>> cells;
  for (int r = 1; r <= f.degree(); ++r) {
    const auto tensor = mean_derivative(pi, f, r);
    for (const auto& j : partitions(r)) {
      const auto norm = injective_norm(tensor, j, opt);
      cells.push_back({std::to_string(r), partition_to_string(j), format_double(norm.value), norm.method});
    }
  }
  ctx.emit(".csv", csv({"order", "partition", "value", "method"}, cells));
  ctx.summary["norms"] = cells.size();
}

template <Scalar T>
void audit_generator(Context& ctx, Generator<T> g) {
  const auto& c = ctx.config;
  if (c.corrupt && g.size() > 1) {
    // Negative control: inflate one positive rate.
    for (std::size_t y = 1; y < g.size(); ++y) {
      if (g.rate(0, y) > T(0)) {
        g.rate(0, y) = g.rate(0, y) * T(3) / T(2);
        break;
      }
    }
    g.fix_diagonal();
  }
  const double db = to_double(check_detailed_balance(g));
  const bool flip_swap = check_flip_swap(g);
  const auto rows = audit_rows(g);
  const double dl = to_double(delta(g));
  const double stab = to_double(stability_functional(g));
  const double db_tol = is_exact_v<T> ? 0.0 : 1e-12;
  const bool db_ok = db <= db_tol;
  const bool rows_ok = to_double(rows.max_row_sum) <= db_tol && to_double(rows.max_negative_rate) <= 0.0;
  const bool delta_ok = dl <= 2.0 * c.k + 1e-12;
  const bool stab_ok = stab <= 2.0 + 1e-12;
  ctx.emit(".csv", csv({"check", "value", "threshold", "pass"},
                       {{"detailed_balance", format_double(db), format_double(db_tol), db_ok ? "1" : "0"},
                        {"flip_swap", flip_swap ? "1" : "0", "1", flip_swap ? "1" : "0"},
                        {"row_sums", format_double(to_double(rows.max_row_sum)), format_double(db_tol), rows_ok ? "1" : "0"},
                        {"delta", format_double(dl), format_double(2.0 * c.k), delta_ok ? "1" : "0"},
                        {"stability_functional", format_double(stab), "2", stab_ok ? "1" : "0"}}));
  ctx.summary["arithmetic"] = is_exact_v<T> ? "rational" : "double";
  ctx.summary["corrupted"] = c.corrupt;
  ctx.fail_if(!db_ok, "detailed balance");
  ctx.fail_if(!flip_swap, "flip-swap structure");
  ctx.fail_if(!rows_ok, "row sums");
  ctx.fail_if(!delta_ok, "Delta above 2k");
  ctx.fail_if(!stab_ok, "stability functional above 2");
  const Generator<double> gf = [&] {
    if constexpr (is_exact_v<T>) {
      return to_float(g);
    } else {
      return g;
    }
  }();
  ctx.emit("_rates.csv", generator_rates_csv(gf));
}

void generator_audit(Context& ctx) {
  const auto& c = ctx.config;
  if (c.rational) {
    std::vector<Rational> p;
    for (double v : ctx.p) p.push_back(exact_rational(v));
    audit_generator(ctx, build_hermon_salez<Rational>(p, c.k));
  } else {
    audit_generator(ctx, build_hermon_salez<double>(ctx.p, c.k));
  }
}

void coupling_audit(Context& ctx) {
  const auto& c = ctx.config;
  if (c.k < 1) throw ConfigError("config field 'distribution.k': coupling audit needs k >= 1");
  std::vector<Rational> p;
  for (double v : ctx.p) p.push_back(exact_rational(v));
  const auto upper = to_table(ExactCondBernoulli(p, c.k));
  const auto lower = to_table(ExactCondBernoulli(p, c.k - 1));
  std::vector<std::vector<std::string>> cells;
  auto audit = [&](const CouplingKernel<Rational>& kernel, const DistributionTable<Rational>& from,
                   const DistributionTable<Rational>& to, const std::string& name) {
    const bool stochastic = max_row_defect(kernel) == 0;
    const auto push = pushforward<Rational>(kernel, from.probs);
    const bool law = push == to.probs;
    const bool cover = covering_holds(kernel);
    cells.push_back({name, stochastic ? "1" : "0", law ? "1" : "0", cover ? "1" : "0"});
    ctx.fail_if(!stochastic, name + " kernel not stochastic");
    ctx.fail_if(!law, name + " pushforward differs from the target law");
    ctx.fail_if(!cover, name + " kernel breaks the covering relation");
    ctx.emit("_" + name + ".csv", kernel_to_csv(kernel));
  };
  audit(up_kernel<Rational>(p, c.k), lower, upper, "up");
  audit(down_kernel<Rational>(p, c.k), upper, lower, "down");
  ctx.emit(".csv", csv({"kernel", "stochastic", "pushforward_exact", "covering"}, cells));
}

void martingale_audit(Context& ctx) {
  const auto& c = ctx.config;
  const auto f = random_inf_convolution(ctx.alpha, c.function.value("anchors", 4), ctx.rng);
  const auto& pi = ctx.table();
  std::vector<double> values;
  for (const auto& x : pi.support) values.push_back(f(x));
  std::vector<std::vector<std::string>> cells;
  double worst = -std::numeric_limits<double>::infinity();
  for (Scheme s : {Scheme::F, Scheme::G}) {
    if (s == Scheme::G && c.k < 1) continue;
    for (const auto& e : enumerate_prefixes(pi, s)) {
      const double inc = increment<double>(pi, values, e);
      const double bound = lipschitz_increment_bound(s, e.step(), ctx.alpha, c.k);
      worst = std::max(worst, std::abs(inc) - bound);
      cells.push_back({scheme_name(s), e.to_string(), std::to_string(e.step()), format_double(inc), format_double(bound)});
    }
  }
  ctx.emit(".csv", csv({"scheme", "history", "step", "increment", "bound"}, cells));
  ctx.summary["histories"] = cells.size();
  ctx.summary["worst_excess"] = format_double(worst);
  ctx.fail_if(worst > 1e-12, "increment above the Lipschitz bound");
}

}  // namespace

RunResult run(const ExperimentConfig& config) {
  Context ctx(config);
  switch (config.kind) {
    case ExperimentKind::lipschitz_tail: lipschitz_tail(ctx); break;
    case ExperimentKind::matrix_tail: matrix_tail(ctx); break;
    case ExperimentKind::talagrand: talagrand(ctx); break;
    case ExperimentKind::polynomial_tail: polynomial_tail(ctx); break;
    case ExperimentKind::generator_audit: generator_audit(ctx); break;
    case ExperimentKind::martingale_audit: martingale_audit(ctx); break;
    case ExperimentKind::coupling_audit: coupling_audit(ctx); break;
    case ExperimentKind::norms: norms(ctx); break;
  }
  return ctx.finish();
}

}  // namespace negdep::lab
