#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "rcd/aero.hpp"
#include "rcd/flight.hpp"
#include "rcd/flight_types.hpp"
#include "rcd/lti.hpp"

namespace rcd::optim {

enum class ProblemKind { kVm, kDm, kVmdc };
enum class OptStatus { kConverged, kMaxIter, kLineSearchFailure };

const char* to_string(ProblemKind kind);
const char* to_string(OptStatus status);

// Reachability sampling recipe frozen for a whole optimization run: the trim
// condition, the horizon grid, and the direction draw. Keeping the seed and
// direction set fixed across iterates makes the metrics deterministic,
// piecewise-smooth functions of the design, which finite differences need.
struct ReachRecipe {
  double airspeed = 200.0;
  double gamma = 0.0;
  double horizon = 2.0;
  int n_steps = 200;
  int directions = 256;
  std::uint64_t seed = 0;
};

// Shared state for metric evaluations: the aero table, the physical
// constants, and the directions drawn once from the recipe seed.
struct MetricContext {
  const aero::AeroTable* table = nullptr;
  aero::AircraftParams params;
  ReachRecipe recipe;
  std::vector<Eigen::VectorXd> directions;

  MetricContext(const aero::AeroTable& table_in, const aero::AircraftParams& params_in,
                const ReachRecipe& recipe_in);  // validates the recipe, draws directions

  [[nodiscard]] lti::TimeGrid grid() const { return {0.0, recipe.horizon, recipe.n_steps}; }
};

// The projection direction used when none is given: straight into the
// pitch-rate/pitch plane at 110 degrees, [0, 0, cos 110deg, sin 110deg].
Eigen::Vector4d default_direction();

// Hull volume of the sampled reachable set of the design linearized at the
// recipe trim. Trim failures propagate (a silent sentinel would poison the
// quasi-Newton model). Evaluating twice gives bit-identical values.
double objective_vm(const flight::Design& d, const MetricContext& ctx);

// Projection length of the reachable set onto v, synthesized exactly for
// +v/-v rather than read off the sampled vertices.
double objective_dm(const flight::Design& d, const Eigen::Vector4d& v, const MetricContext& ctx);

// Feasibility margin of the constrained problem: projection at d minus
// (1 + kappa) times the baseline projection at the starting design. The
// start itself is infeasible by construction for any kappa > 0.
double constraint_vmdc(const flight::Design& d, const Eigen::Vector4d& v, double kappa,
                       double baseline, const MetricContext& ctx);

// Gradient of f over the design box by central differences with step h,
// falling back to a one-sided difference in a coordinate whose stencil would
// leave the box. Evaluation failures propagate with the failing design named.
Eigen::Vector2d fd_gradient(const std::function<double(const flight::Design&)>& f,
                            const flight::Design& d, double h = 0.05);

// One design optimization problem over the box [3,7] x [10,20].
struct OptProblem {
  ProblemKind kind = ProblemKind::kVm;
  flight::Design d0;
  ReachRecipe recipe;
  Eigen::Vector4d v = default_direction();
  double kappa = 0.15;

  OptProblem() = default;
  // Normalizes v (flag-level inputs arrive rounded); requires kappa in [0,1].
  OptProblem(ProblemKind kind_in, const flight::Design& d0_in, const ReachRecipe& recipe_in,
             const Eigen::Vector4d& v_in, double kappa_in);
};

// Objective (maximized) and optional feasibility margin (>= 0 when
// satisfied). The constraint is consulted only for kVmdc problems; tests
// inject analytic functions here.
struct Evaluators {
  std::function<double(const flight::Design&)> objective;
  std::function<double(const flight::Design&)> constraint;
};

// Metric-backed evaluators for the problem: VM and VMDC maximize the hull
// volume, DM the projection along v; VMDC adds the (1 + kappa) projection
// floor with the baseline evaluated at d0 up front.
Evaluators make_evaluators(const OptProblem& problem, const MetricContext& ctx);

struct OptResult {
  flight::Design d_star;
  std::vector<Eigen::Vector2d> designs;      // accepted iterates, d0 first
  std::vector<double> objective_history;     // objective at each accepted iterate
  std::vector<double> constraint_values;     // feasibility margin per iterate (kVmdc only)
  double kkt_residual = 0.0;
  int iterations = 0;
  OptStatus status = OptStatus::kMaxIter;
};

// Maximizes the objective over the design box by SQP: finite-difference
// gradients, damped BFGS curvature of the negated objective, an exhaustively
// enumerated active-set QP in the two design variables, and an l1 merit line
// search (backtracking by 0.5, at most 20 cuts). Terminates when the accepted
// step drops below 1e-3 m in either variable, the relative objective change
// drops below 1e-6, or after 100 iterations. An infeasible kVmdc start first
// runs a restoration phase that maximizes the feasibility margin. Every
// evaluated design stays inside the box. kkt_residual is the stationarity
// residual with least-squares nonnegative multipliers, scaled by
// max(1, |grad f|).
OptResult solve(const OptProblem& problem, const Evaluators& eval);

}  // namespace rcd::optim
