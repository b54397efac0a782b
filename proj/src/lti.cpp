#include "rcd/lti.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "rcd/errors.hpp"

namespace rcd::lti {

LtiSystem::LtiSystem(Eigen::MatrixXd a_in, Eigen::MatrixXd b_in,
                     std::vector<std::string> state_labels_in,
                     std::vector<std::string> input_labels_in)
    : a(std::move(a_in)),
      b(std::move(b_in)),
      state_labels(std::move(state_labels_in)),
      input_labels(std::move(input_labels_in)) {
  if (a.rows() == 0 || a.rows() != a.cols())
    throw ValidationError("LtiSystem: a must be square and non-empty");
  if (b.rows() != a.rows())
    throw ValidationError("LtiSystem: b must have one row per state");
  if (b.cols() == 0) throw ValidationError("LtiSystem: b must have at least one column");
  if (!a.allFinite() || !b.allFinite())
    throw ValidationError("LtiSystem: a and b must be finite");
  if (!state_labels.empty() && state_labels.size() != static_cast<std::size_t>(a.rows()))
    throw ValidationError("LtiSystem: state_labels size mismatch");
  if (!input_labels.empty() && input_labels.size() != static_cast<std::size_t>(b.cols()))
    throw ValidationError("LtiSystem: input_labels size mismatch");
}

TimeGrid::TimeGrid(double t0_in, double t_final_in, int n_steps_in)
    : t0(t0_in), t_final(t_final_in), n_steps(n_steps_in) {
  if (!std::isfinite(t0) || !std::isfinite(t_final))
    throw ValidationError("TimeGrid: endpoints must be finite");
  if (t_final <= t0) throw ValidationError("TimeGrid: t_final must exceed t0");
  if (n_steps < 1) throw ValidationError("TimeGrid: n_steps must be positive");
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& m, double t) {
  if (m.rows() == 0 || m.rows() != m.cols())
    throw ValidationError("expm: matrix must be square and non-empty");
  if (!m.allFinite() || !std::isfinite(t)) throw ValidationError("expm: non-finite input");
  if (t == 0.0) return Eigen::MatrixXd::Identity(m.rows(), m.cols());
  return (m * t).exp();
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> discretize(const LtiSystem& sys, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("discretize: dt must be positive");
  const Eigen::Index n = sys.states();
  const Eigen::Index m = sys.inputs();
  // phi = exp([[a, b], [0, 0]] * dt); the top blocks are exactly (a_d, b_d).
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = sys.a;
  aug.topRightCorner(n, m) = sys.b;
  const Eigen::MatrixXd phi = expm(aug, dt);
  return {phi.topLeftCorner(n, n), phi.topRightCorner(n, m)};
}

Trajectory propagate_pwc(const LtiSystem& sys, const Eigen::VectorXd& x0,
                         const std::vector<Eigen::VectorXd>& inputs, const TimeGrid& grid) {
  if (x0.size() != sys.states()) throw ValidationError("propagate_pwc: x0 dimension mismatch");
  if (inputs.size() != static_cast<std::size_t>(grid.n_steps))
    throw ValidationError("propagate_pwc: need one input per step");
  for (const auto& u : inputs)
    if (u.size() != sys.inputs()) throw ValidationError("propagate_pwc: input dimension mismatch");

  const auto [a_d, b_d] = discretize(sys, grid.dt());
  Trajectory traj;
  traj.times.resize(static_cast<std::size_t>(grid.n_steps) + 1);
  traj.states.resize(static_cast<std::size_t>(grid.n_steps) + 1);
  traj.inputs = inputs;
  traj.times[0] = grid.t0;
  traj.states[0] = x0;
  for (int k = 0; k < grid.n_steps; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    traj.states[ks + 1] = a_d * traj.states[ks] + b_d * inputs[ks];
    traj.times[ks + 1] = grid.t0 + (k + 1) * grid.dt();
  }
  traj.times.back() = grid.t_final;
  return traj;
}

}  // namespace rcd::lti
