#pragma once

// Monotone coupling between pi(p,k) and pi(p,k-1).
//
// Up kernel (from Z' ~ pi(p,k-1) to Z ~ pi(p,k)):
//   P(Z = x + e_r | Z' = x) = E[ 1{Z_r = 1} / #{l : Z_l = 1, x_l = 0} ],  Z ~ pi(p,k)
// Down kernel (from Z ~ pi(p,k) to Z' ~ pi(p,k-1)):
//   P(Z' = x - e_r | Z = x) = E[ 1{Z'_r = 0} / #{l : Z'_l = 0, x_l = 1} ],  Z' ~ pi(p,k-1)
// Both expectations are evaluated by exact enumeration over the slice. Every
// transition adds or removes a single one, so Z covers Z' pathwise.

#include "negdep/cond_bernoulli.hpp"
#include "negdep/cube.hpp"
#include "negdep/random.hpp"
#include "negdep/scalar.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace negdep {

enum class CouplingDirection { up, down };

template <Scalar T>
struct CouplingKernel {
  struct Transition {
    std::size_t target;  // index into `targets`
    int coordinate;      // the coordinate added (up) or removed (down)
    T prob;
  };

  CouplingDirection direction = CouplingDirection::up;
  int n = 0;
  int k = 0;  // level of the upper measure
  std::vector<CubeState> sources;
  std::vector<CubeState> targets;
  std::vector<std::vector<Transition>> rows;  // one row per source
  StateIndex source_index;
  StateIndex target_index;

  /// P(target = to | source = from); zero when the pair is not a transition.
  T transition(const CubeState& from, const CubeState& to) const;
};

template <Scalar T>
CouplingKernel<T> up_kernel(std::span<const T> p, int k);

template <Scalar T>
CouplingKernel<T> down_kernel(std::span<const T> p, int k);

/// Law of the target when the source is drawn from `source_probs`.
template <Scalar T>
std::vector<T> pushforward(const CouplingKernel<T>& kernel, std::span<const T> source_probs);

/// Largest |row sum - 1| (exactly zero for a stochastic exact kernel).
template <Scalar T>
T max_row_defect(const CouplingKernel<T>& kernel);

/// True iff every transition links states at Hamming distance one, with the
/// upper state covering the lower one.
template <Scalar T>
bool covering_holds(const CouplingKernel<T>& kernel);

/// Joint law of (upper, lower) as a dense matrix mass[upper][lower]; upper states
/// index slice k, lower states slice k-1, both in enumeration order.
template <Scalar T>
struct CouplingJoint {
  std::vector<CubeState> upper;
  std::vector<CubeState> lower;
  std::vector<std::vector<T>> mass;  // [upper][lower]
};

/// Joint table obtained by weighting kernel rows with the source law.
template <Scalar T>
CouplingJoint<T> joint_from_kernel(const CouplingKernel<T>& kernel, std::span<const T> source_probs);

/// Draws Z ~ pi(p,k) and then Z' from the down kernel.
class CouplingSampler {
 public:
  CouplingSampler(std::vector<double> p, int k);

  std::pair<CubeState, CubeState> draw(RandomStream& rng) const;
  const CouplingKernel<double>& kernel() const { return down_; }

 private:
  CondBernoulli upper_;
  CouplingKernel<double> down_;
};

std::pair<CubeState, CubeState> sample_pair(std::span<const double> p, int k, RandomStream& rng);

/// CSV rows "source,target,probability" with 17 significant digits.
template <Scalar T>
std::string kernel_to_csv(const CouplingKernel<T>& kernel);

}  // namespace negdep
