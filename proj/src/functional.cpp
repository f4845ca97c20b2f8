#include "negdep/functional.hpp"

#include "negdep/parallel.hpp"
#include "negdep/random.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace negdep {

namespace {

void require_table(const Generator<double>& g, std::size_t len) {
  if (len != g.size()) throw std::invalid_argument("function table does not match the support size");
}

template <Scalar T>
void require_table_t(const Generator<T>& g, std::size_t len) {
  if (len != g.size()) throw std::invalid_argument("function table does not match the support size");
}

// s log s - s + 1 at s = e^v, accurate for small |v|.
double psi_exp(double v) {
  if (std::abs(v) < 0.05) {
    double term = v * v / 2.0;  // (j-1)/j! v^j at j = 2
    double sum = term;
    double power = v * v;
    double fact = 2.0;
    for (int j = 3; j <= 10; ++j) {
      power *= v;
      fact *= j;
      sum += (j - 1) / fact * power;
    }
    return sum;
  }
  return std::exp(v) * (v - 1.0) + 1.0;
}

struct RatioParts {
  double numerator = 0.0;    // E(e^u, u)
  double denominator = 0.0;  // Ent(e^u)
  double log_mass = 0.0;     // log pi(e^u)
};

class MlsiObjective {
 public:
  explicit MlsiObjective(const Generator<double>& g) : g_(g), m_(g.size()) {
    for (std::size_t x = 0; x < m_; ++x) {
      for (std::size_t y = 0; y < m_; ++y) {
        if (x == y) continue;
        const double w = g.stationary[x] * g.rate(x, y);
        if (w > 0.0) edges_.push_back({x, y, w});
      }
    }
  }

  std::size_t size() const { return m_; }

  RatioParts parts(std::span<const double> u) const {
    RatioParts out;
    const double top = *std::max_element(u.begin(), u.end());
    double mass = 0.0;
    for (std::size_t x = 0; x < m_; ++x) mass += g_.stationary[x] * std::exp(u[x] - top);
    out.log_mass = top + std::log(mass);
    double ent = 0.0;
    for (std::size_t x = 0; x < m_; ++x) ent += g_.stationary[x] * psi_exp(u[x] - out.log_mass);
    out.denominator = ent;  // relative to pi(e^u) = 1
    double num = 0.0;
    for (const auto& e : edges_) {
      const double d = u[e.x] - u[e.y];
      if (d <= 0.0) continue;  // each unordered pair counted once via the positive orientation
      num += e.w * std::exp(u[e.y] - out.log_mass) * std::expm1(d) * d;
    }
    out.numerator = num;
    return out;
  }

  double ratio(std::span<const double> u) const {
    const auto p = parts(u);
    if (!(p.denominator > 0.0)) return std::numeric_limits<double>::infinity();
    return p.numerator / p.denominator;
  }

  // Gradient of the ratio with respect to u.
  std::vector<double> gradient(std::span<const double> u, const RatioParts& p) const {
    std::vector<double> e(m_);
    for (std::size_t x = 0; x < m_; ++x) e[x] = std::exp(u[x] - p.log_mass);
    const double r = p.numerator / p.denominator;
    std::vector<double> grad(m_, 0.0);
    for (const auto& ed : edges_) {
      const double d = u[ed.x] - u[ed.y];
      grad[ed.x] += ed.w * (e[ed.x] * d + (e[ed.x] - e[ed.y]));
    }
    for (std::size_t z = 0; z < m_; ++z) {
      const double dent = g_.stationary[z] * e[z] * (u[z] - p.log_mass);
      grad[z] = (grad[z] - r * dent) / p.denominator;
    }
    return grad;
  }

 private:
  struct Edge {
    std::size_t x, y;
    double w;
  };
  const Generator<double>& g_;
  std::size_t m_;
  std::vector<Edge> edges_;
};

double amplitude(std::span<const double> u) {
  const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
  return *hi - *lo;
}

struct DescentOutcome {
  double ratio = std::numeric_limits<double>::infinity();
  std::vector<double> u;
  bool degenerate = false;
  bool converged = false;
};

DescentOutcome descend(const MlsiObjective& obj, std::vector<double> u, const MlsiOptions& opt) {
  constexpr double kArmijo = 1e-4;
  constexpr double kMinAmplitude = 1e-7;
  DescentOutcome out;
  auto p = obj.parts(u);
  if (!(p.denominator > 0.0) || amplitude(u) < kMinAmplitude) {
    out.degenerate = true;
    return out;
  }
  double r = p.numerator / p.denominator;
  double step = 0.5;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const auto grad = obj.gradient(u, p);
    double gnorm = 0.0;
    for (double v : grad) gnorm += v * v;
    gnorm = std::sqrt(gnorm);
    if (!(gnorm > 0.0)) {
      out.converged = true;
      break;
    }
    bool accepted = false;
    std::vector<double> trial(u.size());
    while (step > 1e-14) {
      for (std::size_t i = 0; i < u.size(); ++i) trial[i] = u[i] - step * grad[i] / gnorm;
      const auto tp = obj.parts(trial);
      if (tp.denominator > 0.0) {
        const double tr = tp.numerator / tp.denominator;
        if (tr <= r - kArmijo * step * gnorm) {
          const double change = std::abs(r - tr);
          u.swap(trial);
          p = tp;
          r = tr;
          accepted = true;
          step *= 2.0;
          if (change < opt.tol * std::abs(r)) out.converged = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      out.converged = true;
      break;
    }
    if (amplitude(u) < kMinAmplitude) {
      out.degenerate = true;
      break;
    }
    if (out.converged) break;
  }
  // Recenter so the reported candidate has pi(f) = 1.
  for (auto& v : u) v -= p.log_mass;
  out.ratio = r;
  out.u = std::move(u);
  return out;
}

Eigen::MatrixXd symmetrized(const Generator<double>& g) {
  const auto m = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd s(m, m);
  for (Eigen::Index x = 0; x < m; ++x) {
    for (Eigen::Index y = 0; y < m; ++y) {
      const double px = g.stationary[static_cast<std::size_t>(x)];
      const double py = g.stationary[static_cast<std::size_t>(y)];
      s(x, y) = -std::sqrt(px / py) * g.rate(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
    }
  }
  return 0.5 * (s + s.transpose());
}

}  // namespace

template <Scalar T>
T gamma(const Generator<T>& g, std::span<const T> f, std::span<const T> h, std::size_t x) {
  require_table_t(g, f.size());
  require_table_t(g, h.size());
  T sum = 0;
  for (std::size_t y = 0; y < g.size(); ++y) {
    if (y == x) continue;
    const T& r = g.rate(x, y);
    if (r == T(0)) continue;
    sum += (f[x] - f[y]) * (h[x] - h[y]) * r;
  }
  return sum / T(2);
}

template <Scalar T>
T gamma_plus(const Generator<T>& g, std::span<const T> f, std::size_t x) {
  require_table_t(g, f.size());
  T sum = 0;
  for (std::size_t y = 0; y < g.size(); ++y) {
    if (y == x) continue;
    const T d = f[x] - f[y];
    if (d > T(0)) sum += d * d * g.rate(x, y);
  }
  return sum;
}

template <Scalar T>
T dirichlet(const Generator<T>& g, std::span<const T> f, std::span<const T> h) {
  require_table_t(g, f.size());
  require_table_t(g, h.size());
  T sum = 0;
  for (std::size_t x = 0; x < g.size(); ++x) {
    T qh = 0;
    for (std::size_t y = 0; y < g.size(); ++y) qh += g.rate(x, y) * h[y];
    sum += g.stationary[x] * f[x] * qh;
  }
  return -sum;
}

template <Scalar T>
T expectation(std::span<const T> pi, std::span<const T> f) {
  if (pi.size() != f.size()) throw std::invalid_argument("function table does not match the measure");
  T sum = 0;
  for (std::size_t x = 0; x < pi.size(); ++x) sum += pi[x] * f[x];
  return sum;
}

double entropy(std::span<const double> pi, std::span<const double> f) {
  if (pi.size() != f.size()) throw std::invalid_argument("function table does not match the measure");
  double mean = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) {
    if (f[x] < 0.0) throw std::invalid_argument("entropy needs a nonnegative function");
    mean += pi[x] * f[x];
  }
  if (mean == 0.0) return 0.0;
  // sum pi m psi(f/m) with psi(s) = s log s - s + 1: every term is nonnegative.
  double ent = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) {
    const double s = f[x] / mean;
    ent += pi[x] * (s > 0.0 ? s * std::log(s) - s + 1.0 : 1.0);
  }
  return std::max(0.0, mean * ent);
}

double variance(std::span<const double> pi, std::span<const double> f) {
  const double mean = expectation<double>(pi, f);
  double v = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) v += pi[x] * (f[x] - mean) * (f[x] - mean);
  return v;
}

double spectral_gap(const Generator<double>& g) {
  if (g.size() < 2) throw std::invalid_argument("spectral gap needs at least two states");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetrized(g), Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  const double scale = std::max(1.0, std::abs(ev(ev.size() - 1)));
  if (ev(1) <= 1e-10 * scale) throw std::invalid_argument("generator is reducible on its support");
  return ev(1);
}

double mlsi_ratio(const Generator<double>& g, std::span<const double> f) {
  require_table(g, f.size());
  std::vector<double> logf(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!(f[i] > 0.0)) throw std::invalid_argument("mLSI ratio needs a positive function");
    logf[i] = std::log(f[i]);
  }
  const double ent = entropy(g.stationary, f);
  if (!(ent > 0.0)) return std::numeric_limits<double>::infinity();
  return dirichlet<double>(g, f, logf) / ent;
}

MlsiResult mlsi_upper_estimate(const Generator<double>& g, const MlsiOptions& options) {
  if (g.size() < 2) throw std::invalid_argument("mLSI estimate needs at least two states");
  if (options.restarts < 1) throw std::invalid_argument("mLSI estimate needs at least one restart");
  const MlsiObjective obj(g);
  const std::size_t m = g.size();
  const auto restarts = static_cast<std::size_t>(options.restarts);

  std::vector<DescentOutcome> outcomes(restarts + 1);
  parallel_for(restarts, [&](std::size_t r) {
    RandomStream rng = RandomStream::derive(options.seed, r);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> u(m);
    for (auto& v : u) v = normal(rng);
    outcomes[r] = descend(obj, std::move(u), options);
  });

  // Near constants the ratio tends to 2 E(v,v) / Var(v); the gap eigenvector minimizes that limit.
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetrized(g));
    Eigen::VectorXd phi = solver.eigenvectors().col(1);
    std::vector<double> u(m);
    double top = 0.0;
    for (std::size_t x = 0; x < m; ++x) {
      u[x] = phi(static_cast<Eigen::Index>(x)) / std::sqrt(g.stationary[x]);
      top = std::max(top, std::abs(u[x]));
    }
    if (top > 0.0) {
      for (auto& v : u) v *= 1e-3 / top;
    }
    outcomes[restarts] = descend(obj, std::move(u), options);
  }

  MlsiResult result;
  result.restarts = options.restarts;
  result.estimate = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    const auto& o = outcomes[r];
    if (r < restarts) {
      if (o.degenerate) ++result.degenerate;
      if (o.converged) ++result.converged;
    }
    if (o.degenerate || !std::isfinite(o.ratio)) continue;
    if (o.ratio < result.estimate) {
      result.estimate = o.ratio;
      result.worst_candidate.resize(m);
      for (std::size_t x = 0; x < m; ++x) result.worst_candidate[x] = std::exp(o.u[x]);
    }
  }
  if (!std::isfinite(result.estimate)) {
    throw std::runtime_error("all mLSI restarts degenerated to constant functions");
  }
  return result;
}

double herbst_bound(double rho, double gp_sup, double t) {
  if (!(rho > 0.0)) throw std::invalid_argument("herbst bound needs rho > 0");
  if (!(gp_sup > 0.0)) throw std::invalid_argument("herbst bound needs sup Gamma_+ > 0");
  if (t < 0.0) throw std::invalid_argument("t must be nonnegative");
  return std::clamp(std::exp(-t * t * rho / (4.0 * gp_sup)), 0.0, 1.0);
}

double prop46_bound(double R, double delta, double rho, const WeightVector& alpha, double t) {
  if (!(R > 0.0) || !(delta > 0.0) || !(rho > 0.0)) {
    throw std::invalid_argument("R, Delta and rho must be positive");
  }
  if (t < 0.0) throw std::invalid_argument("t must be nonnegative");
  if (t == 0.0) return 1.0;
  const double m = std::ceil(delta / (R * rho) - 1e-12);
  const double first = 8.0 * R * alpha.squared_norm();
  const double second = 16.0 * alpha.top_squared_sum(static_cast<std::size_t>(std::max(m, 0.0)));
  const double denom = std::min(first, second);
  if (!(denom > 0.0)) return 0.0;
  return std::clamp(std::exp(-t * t / denom), 0.0, 1.0);
}

double moment_constant() {
  const double se = std::sqrt(std::exp(1.0));
  return std::sqrt(3.0 * se / (se - 1.0));
}

MomentCheck moment_check(const Generator<double>& g, std::span<const double> f, double p, double rho_lower) {
  require_table(g, f.size());
  if (!(p >= 2.0)) throw std::invalid_argument("moment check needs p >= 2");
  if (!(rho_lower > 0.0)) throw std::invalid_argument("rho lower bound must be positive");
  const double mean = expectation<double>(g.stationary, f);
  double lhs = 0.0;
  double rhs = 0.0;
  for (std::size_t x = 0; x < g.size(); ++x) {
    const double dev = std::max(0.0, f[x] - mean);
    lhs += g.stationary[x] * std::pow(dev, p);
    rhs += g.stationary[x] * std::pow(gamma_plus<double>(g, f, x), p / 2.0);
  }
  MomentCheck out;
  out.lhs = std::pow(lhs, 1.0 / p);
  out.rhs = moment_constant() * std::sqrt(p / rho_lower) * std::pow(rhs, 1.0 / p);
  out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : (out.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  out.pass = out.lhs <= out.rhs * (1.0 + 1e-12) + 1e-15;
  return out;
}

std::string audit_report_json(double gap, const MlsiResult& mlsi) {
  nlohmann::json j;
  j["gap"] = gap;
  j["mlsi_estimate"] = mlsi.estimate;
  j["restarts"] = mlsi.restarts;
  j["degenerate_restarts"] = mlsi.degenerate;
  j["worst_candidate"] = mlsi.worst_candidate;
  return j.dump();
}

#define NEGDEP_INSTANTIATE(T)                                                                       \
  template T gamma<T>(const Generator<T>&, std::span<const T>, std::span<const T>, std::size_t);   \
  template T gamma_plus<T>(const Generator<T>&, std::span<const T>, std::size_t);                  \
  template T dirichlet<T>(const Generator<T>&, std::span<const T>, std::span<const T>);            \
  template T expectation<T>(std::span<const T>, std::span<const T>);

NEGDEP_INSTANTIATE(double)
NEGDEP_INSTANTIATE(Rational)

#undef NEGDEP_INSTANTIATE

}  // namespace negdep
