#include "negdep/coupling.hpp"

#include <bit>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace negdep {

namespace {

void check_levels(std::size_t n, int k) {
  if (k < 1 || k > static_cast<int>(n)) {
    throw std::invalid_argument("coupling level k=" + std::to_string(k) + " outside [1," +
                                std::to_string(n) + "]");
  }
  if (n > static_cast<std::size_t>(kMaxEnumerationDim)) {
    throw std::invalid_argument("coupling kernels are enumerated only for n <= 24");
  }
}

// weights[z][c-1] = prob(z) / c for c = 1..n, to avoid repeated division.
template <Scalar T>
std::vector<std::vector<T>> scaled_weights(const std::vector<T>& probs, int n) {
  std::vector<std::vector<T>> out(probs.size());
  for (std::size_t z = 0; z < probs.size(); ++z) {
    out[z].reserve(static_cast<std::size_t>(n));
    for (int c = 1; c <= n; ++c) out[z].push_back(T(probs[z] / T(c)));
  }
  return out;
}

// Shared body of both kernels. For each source x and each state w of the
// reference slice, the coordinates in `w & ~x` (up) or `x & ~w` (down) each
// receive prob(w) / (their count).
template <Scalar T>
CouplingKernel<T> build_kernel(std::span<const T> p, int k, CouplingDirection dir) {
  check_levels(p.size(), k);
  const int n = static_cast<int>(p.size());
  const std::vector<T> pv(p.begin(), p.end());
  const CondBernoulliSpec<T> upper_spec(pv, k);
  const CondBernoulliSpec<T> lower_spec(pv, k - 1);

  CouplingKernel<T> kernel;
  kernel.direction = dir;
  kernel.n = n;
  kernel.k = k;
  const bool up = dir == CouplingDirection::up;
  kernel.sources = enumerate_slice(n, up ? k - 1 : k);
  kernel.targets = enumerate_slice(n, up ? k : k - 1);
  kernel.source_index = StateIndex(kernel.sources);
  kernel.target_index = StateIndex(kernel.targets);

  // The expectation runs over the law of the target level.
  const auto reference = to_table(up ? upper_spec : lower_spec);
  const auto weights = scaled_weights(reference.probs, n);

  kernel.rows.resize(kernel.sources.size());
  std::vector<T> acc(static_cast<std::size_t>(n));
  for (std::size_t s = 0; s < kernel.sources.size(); ++s) {
    const std::uint64_t x = kernel.sources[s].bits();
    for (auto& a : acc) a = 0;
    for (std::size_t w = 0; w < reference.size(); ++w) {
      const std::uint64_t wb = reference.support[w].bits();
      std::uint64_t moves = up ? (wb & ~x) : (x & ~wb);
      const int count = std::popcount(moves);
      const T& share = weights[w][static_cast<std::size_t>(count - 1)];
      while (moves != 0) {
        const int r = std::countr_zero(moves);
        acc[static_cast<std::size_t>(r)] += share;
        moves &= moves - 1;
      }
    }
    std::uint64_t candidates = up ? (~x & ((std::uint64_t{1} << n) - 1)) : x;
    while (candidates != 0) {
      const int r = std::countr_zero(candidates);
      candidates &= candidates - 1;
      const T& prob = acc[static_cast<std::size_t>(r)];
      if (prob == T(0)) continue;
      const CubeState target(n, x ^ (std::uint64_t{1} << r));
      kernel.rows[s].push_back({kernel.target_index.at(target), r, prob});
    }
  }
  return kernel;
}

}  // namespace

template <Scalar T>
T CouplingKernel<T>::transition(const CubeState& from, const CubeState& to) const {
  const auto s = source_index.find(from);
  const auto t = target_index.find(to);
  if (s < 0 || t < 0) return T(0);
  for (const auto& tr : rows[static_cast<std::size_t>(s)]) {
    if (tr.target == static_cast<std::size_t>(t)) return tr.prob;
  }
  return T(0);
}

template <Scalar T>
CouplingKernel<T> up_kernel(std::span<const T> p, int k) {
  return build_kernel<T>(p, k, CouplingDirection::up);
}

template <Scalar T>
CouplingKernel<T> down_kernel(std::span<const T> p, int k) {
  return build_kernel<T>(p, k, CouplingDirection::down);
}

template <Scalar T>
std::vector<T> pushforward(const CouplingKernel<T>& kernel, std::span<const T> source_probs) {
  if (source_probs.size() != kernel.sources.size()) {
    throw std::invalid_argument("source law does not match the kernel's source slice");
  }
  std::vector<T> out(kernel.targets.size(), T(0));
  for (std::size_t s = 0; s < kernel.sources.size(); ++s) {
    for (const auto& tr : kernel.rows[s]) out[tr.target] += source_probs[s] * tr.prob;
  }
  return out;
}

template <Scalar T>
T max_row_defect(const CouplingKernel<T>& kernel) {
  T worst = 0;
  for (const auto& row : kernel.rows) {
    T sum = 0;
    for (const auto& tr : row) sum += tr.prob;
    const T defect = abs_value<T>(T(sum - T(1)));
    if (defect > worst) worst = defect;
  }
  return worst;
}

template <Scalar T>
bool covering_holds(const CouplingKernel<T>& kernel) {
  const bool up = kernel.direction == CouplingDirection::up;
  for (std::size_t s = 0; s < kernel.sources.size(); ++s) {
    for (const auto& tr : kernel.rows[s]) {
      const CubeState& from = kernel.sources[s];
      const CubeState& to = kernel.targets[tr.target];
      if (tr.prob < T(0)) return false;
      if (hamming(from, to) != 1) return false;
      if (up ? !covers(to, from) : !covers(from, to)) return false;
    }
  }
  return true;
}

template <Scalar T>
CouplingJoint<T> joint_from_kernel(const CouplingKernel<T>& kernel, std::span<const T> source_probs) {
  if (source_probs.size() != kernel.sources.size()) {
    throw std::invalid_argument("source law does not match the kernel's source slice");
  }
  const bool up = kernel.direction == CouplingDirection::up;
  CouplingJoint<T> joint;
  joint.upper = up ? kernel.targets : kernel.sources;
  joint.lower = up ? kernel.sources : kernel.targets;
  joint.mass.assign(joint.upper.size(), std::vector<T>(joint.lower.size(), T(0)));
  for (std::size_t s = 0; s < kernel.sources.size(); ++s) {
    for (const auto& tr : kernel.rows[s]) {
      const T m = source_probs[s] * tr.prob;
      if (up) {
        joint.mass[tr.target][s] += m;
      } else {
        joint.mass[s][tr.target] += m;
      }
    }
  }
  return joint;
}

CouplingSampler::CouplingSampler(std::vector<double> p, int k)
    : upper_(p, k), down_(down_kernel<double>(p, k)) {}

std::pair<CubeState, CubeState> CouplingSampler::draw(RandomStream& rng) const {
  const CubeState z = sample(upper_, rng);
  const auto& row = down_.rows[down_.source_index.at(z)];
  double u = rng.uniform();
  for (const auto& tr : row) {
    if (u < tr.prob) return {z, down_.targets[tr.target]};
    u -= tr.prob;
  }
  // Rounding left u just past the final mass.
  return {z, down_.targets[row.back().target]};
}

std::pair<CubeState, CubeState> sample_pair(std::span<const double> p, int k, RandomStream& rng) {
  return CouplingSampler(std::vector<double>(p.begin(), p.end()), k).draw(rng);
}

template <Scalar T>
std::string kernel_to_csv(const CouplingKernel<T>& kernel) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "source,target,probability\n";
  for (std::size_t s = 0; s < kernel.sources.size(); ++s) {
    for (const auto& tr : kernel.rows[s]) {
      out << kernel.sources[s].to_string() << ',' << kernel.targets[tr.target].to_string() << ',';
      if constexpr (is_exact_v<T>) {
        out << to_double(tr.prob);
      } else {
        out << tr.prob;
      }
      out << '\n';
    }
  }
  return out.str();
}

#define NEGDEP_INSTANTIATE(T)                                                                      \
  template struct CouplingKernel<T>;                                                               \
  template CouplingKernel<T> up_kernel<T>(std::span<const T>, int);                                \
  template CouplingKernel<T> down_kernel<T>(std::span<const T>, int);                              \
  template std::vector<T> pushforward<T>(const CouplingKernel<T>&, std::span<const T>);            \
  template T max_row_defect<T>(const CouplingKernel<T>&);                                          \
  template bool covering_holds<T>(const CouplingKernel<T>&);                                       \
  template CouplingJoint<T> joint_from_kernel<T>(const CouplingKernel<T>&, std::span<const T>);    \
  template std::string kernel_to_csv<T>(const CouplingKernel<T>&);

NEGDEP_INSTANTIATE(double)
NEGDEP_INSTANTIATE(Rational)

#undef NEGDEP_INSTANTIATE

}  // namespace negdep
