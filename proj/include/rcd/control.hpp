#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "rcd/aero.hpp"
#include "rcd/flight.hpp"
#include "rcd/flight_types.hpp"
#include "rcd/lti.hpp"
#include "rcd/reach.hpp"

namespace rcd::control {

// Quadratic tracking weights: q penalizes state error (n x n, or (n+1) x (n+1)
// when an integrator is appended), r penalizes control effort.
struct WeightSpec {
  Eigen::MatrixXd q;
  Eigen::MatrixXd r;

  WeightSpec() = default;
  // Throws ValidationError unless q is symmetric (1e-12) with eigenvalues
  // >= -1e-12 and r is symmetric with strictly positive eigenvalues.
  WeightSpec(Eigen::MatrixXd q_in, Eigen::MatrixXd r_in);
};

enum class TrackingMode { kLqFinite, kLqi, kNonlinearLqi };

// One linear tracking problem: drive the output c_row * x to the constant
// reference value. duration/n_steps are the recipe for the integration grid.
struct TrackingTask {
  TrackingMode mode = TrackingMode::kLqFinite;
  double reference = 0.0;
  Eigen::RowVectorXd c_row;
  double duration = 30.0;
  int n_steps = 3000;

  TrackingTask() = default;
  TrackingTask(TrackingMode mode_in, double reference_in, Eigen::RowVectorXd c_row_in,
               double duration_in = 30.0, int n_steps_in = 3000);  // validates

  [[nodiscard]] lti::TimeGrid grid() const { return {0.0, duration, n_steps}; }
};

struct PerformanceReport {
  double tracking_error_l2 = 0.0;          // tracked output vs reference
  double control_cost_l2 = 0.0;            // control signal (deviation from trim)
  std::vector<double> state_error_l2;      // one entry per model state
  double saturation_fraction = 0.0;        // fraction of samples on the input-box boundary
};

// sqrt of the trapezoidal integral of sum_i sigma_i(t)^2 over a uniform grid
// with spacing dt. Throws ValidationError on an empty signal or dt <= 0.
double l2_norm(const std::vector<Eigen::VectorXd>& signal, double dt);

// Stabilizing solution of a'p + pa - p b r^-1 b' p + q = 0. Initial guess from
// the stable invariant subspace of the Hamiltonian [[a, -b r^-1 b'], [-q, -a']],
// refined by Newton iterations (each one a Lyapunov solve). Guarantees residual
// Frobenius norm < 1e-8 * (1 + |p|) and a - b r^-1 b' p Hurwitz, else throws
// SolverError; a non-stabilizable pair surfaces as a failed n/n spectral split.
Eigen::MatrixXd solve_care(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           const Eigen::MatrixXd& q, const Eigen::MatrixXd& r);

// Riccati solution p(t) and tracking adjoint adj(t) tabulated at half steps:
// entry j holds the value at grid.t0 + j*dt/2, j = 0 .. 2*n_steps, so a forward
// RK4 pass can read exact values at every substage time. The control law is
// u(t_j, x) = -r^-1 b' (p[j] x - adj[j]); the feedback gain is r^-1 b' p[j].
struct TrackingSchedule {
  std::vector<Eigen::MatrixXd> p;
  std::vector<Eigen::VectorXd> adjoint;
};

// Backward RK4 sweep of -dp/dt = a'p + pa - p b r^-1 b' p + q with p(T) = 0 and
// of -d(adj)/dt = (a - b r^-1 b' p)' adj + q * x_ref(t) with adj(T) = 0.
// x_ref holds grid.n_steps + 1 states at the grid nodes; values between nodes
// are linearly interpolated (exact for the constant references used here).
// Throws SolverError if |p| exceeds 1e12 (horizon too long for this system).
TrackingSchedule solve_lq_tracking(const lti::LtiSystem& sys, const WeightSpec& weights,
                                   const std::vector<Eigen::VectorXd>& x_ref,
                                   const lti::TimeGrid& grid);

// Appends an integrator state z with dz/dt = c_row * x: returns the block pair
// a_hat = [[a, 0], [c_row, 0]], b_hat = [[b], [0]].
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> augment_integrator(const Eigen::MatrixXd& a,
                                                               const Eigen::MatrixXd& b,
                                                               const Eigen::RowVectorXd& c_row);

// Closed-loop tracking simulation of dx/dt = a x + b u on the grid, forward RK4
// with the commanded control clipped to box componentwise at every substage.
// kLqFinite runs the finite-horizon law from solve_lq_tracking against the
// least-norm state target with c_row * x_ref = reference; kLqi runs constant
// state feedback from solve_care on the integrator-augmented system with the
// -reference forcing on the z channel (weights.q then has n+1 rows). x0 empty
// means the origin. Returned states and inputs are sampled at the grid nodes
// (n_steps + 1 of each); the report covers the tracked output, per-state
// errors, control effort, and the fraction of input samples on the box
// boundary.
std::pair<lti::Trajectory, PerformanceReport> simulate_linear_tracking(
    const lti::LtiSystem& sys, const reach::InputBox& box, const TrackingTask& task,
    const WeightSpec& weights, const lti::TimeGrid& grid,
    const Eigen::VectorXd& x0 = Eigen::VectorXd());

// One leg of the nonlinear maneuver: trim target and how long to hold it.
struct ManeuverPhase {
  double airspeed = 0.0;
  double gamma = 0.0;
  double duration = 0.0;
};

// The default two-phase task: climb at 190 m/s with a 10 degree flight path
// angle for 20 s, then fly level at 210 m/s for 20 s.
std::vector<ManeuverPhase> climb_then_cruise();

// Multi-phase LQI tracking on the nonlinear longitudinal model. Each phase is
// trimmed and linearized on its own; a pitch-angle integrator is appended and
// the phase gain comes from solve_care on that augmented system. The commanded
// control u_trim - k [x - x_trim; z] is clipped to the physical ranges
// delta_th in [0,1], delta_e in [-0.523, 0.523] at every RK4 substage, and the
// integrator restarts at zero when the active phase changes (each phase has an
// independently designed controller). The initial state defaults to the level
// flight trim at the first phase's airspeed; pass x0 (4 entries) to override.
// Trajectory states/inputs are absolute physical values at the grid nodes; the
// report gives per-state L2 deviations from the active phase's trim and the L2
// cost of the control deviation from the active trim inputs.
std::pair<lti::Trajectory, PerformanceReport> simulate_nonlinear_tracking(
    const flight::Design& design, const aero::AeroTable& table,
    const aero::AircraftParams& params, const std::vector<ManeuverPhase>& phases,
    const WeightSpec& weights, const lti::TimeGrid& grid,
    const Eigen::VectorXd& x0 = Eigen::VectorXd());

}  // namespace rcd::control
