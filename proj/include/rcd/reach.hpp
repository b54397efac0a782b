#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "rcd/lti.hpp"

namespace rcd::reach {

// Box of admissible inputs, lower <= u <= upper componentwise. The box is
// allowed to be asymmetric about the origin; degenerate (lower == upper)
// channels pin that input.
struct InputBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  InputBox() = default;
  InputBox(Eigen::VectorXd lower_in, Eigen::VectorXd upper_in);  // validates

  [[nodiscard]] Eigen::Index channels() const { return lower.size(); }
};

// Convex-hull approximation of the reachable set at the grid horizon from
// x0 = 0: one exposed point per sampled direction. vertices[i] attains the
// maximum of directions[i]^T x over the sampled set.
struct ReachSet {
  std::vector<Eigen::VectorXd> vertices;
  std::vector<Eigen::VectorXd> directions;
  lti::TimeGrid horizon;
  std::uint64_t seed = 0;
  std::string system_fingerprint;
};

// Hex digest of (a, b, lower, upper); lets a stored ReachSet be checked
// against the system it claims to describe.
std::string system_fingerprint(const lti::LtiSystem& sys, const InputBox& box);

// Shared per-(system, grid) precomputation: exact ZOH step matrices plus the
// switching basis e^(a (T - t_mid_k)) b for every step midpoint t_mid_k. All
// extremal-control queries against one system reuse this.
struct ReachPropagator {
  Eigen::MatrixXd a_d;
  Eigen::MatrixXd b_d;
  std::vector<Eigen::MatrixXd> switching_basis;  // n_steps entries, states x inputs
  lti::TimeGrid grid;

  static ReachPropagator build(const lti::LtiSystem& sys, const lti::TimeGrid& grid);
};

// psi(t_mid_k; c) = c^T e^(a (T - t_mid_k)) b per step midpoint: the sign
// pattern of the terminal-direction extremal control.
std::vector<Eigen::VectorXd> switching_function(const lti::LtiSystem& sys,
                                                const Eigen::VectorXd& c,
                                                const lti::TimeGrid& grid);

// Componentwise bang-bang control for direction c: upper bound where the
// switching function is >= 0 (ties resolve to the upper bound), lower bound
// otherwise.
std::vector<Eigen::VectorXd> bangbang_control(const lti::LtiSystem& sys, const InputBox& box,
                                              const Eigen::VectorXd& c,
                                              const lti::TimeGrid& grid);

// Terminal state reached from x0 = 0 under the bang-bang control for c: the
// exposed point of the sampled reachable set in direction c.
Eigen::VectorXd extreme_point(const lti::LtiSystem& sys, const InputBox& box,
                              const Eigen::VectorXd& c, const lti::TimeGrid& grid);

// Length of the projection of the reachable set onto direction v:
// h(v) + h(-v) with h the support value at the horizon.
double support_length(const lti::LtiSystem& sys, const InputBox& box, const Eigen::VectorXd& v,
                      const lti::TimeGrid& grid);

// Batch extremal evaluation, one exposed point per direction. The parallel
// kernel writes each result into its own slot, so its output is bit-identical
// to the serial reference regardless of thread count.
std::vector<Eigen::VectorXd> extreme_points(const ReachPropagator& prop, const InputBox& box,
                                            const std::vector<Eigen::VectorXd>& directions);
std::vector<Eigen::VectorXd> extreme_points_serial(const ReachPropagator& prop,
                                                   const InputBox& box,
                                                   const std::vector<Eigen::VectorXd>& directions);

// Samples k directions (seeded counter-based Gaussians, normalized) and
// returns the exposed points. Same seed implies the same direction sequence,
// and a smaller k is always a prefix of a larger one.
ReachSet sample_reach_set(const lti::LtiSystem& sys, const InputBox& box, int k,
                          const lti::TimeGrid& grid, std::uint64_t seed);

// Exact hull volume of the vertex cloud; 0 with *degenerate = true when the
// points span fewer than state-space dimensions.
double hull_volume(const std::vector<Eigen::VectorXd>& points, bool* degenerate = nullptr);

// Approximate membership of x in conv(vertices), decided by a phase-1 LP over
// convex-combination weights (deliberately independent of the facet
// enumeration so the two can cross-check each other).
bool contains(const ReachSet& set, const Eigen::VectorXd& x, double tol);

}  // namespace rcd::reach
