#include "rcd/control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "rcd/errors.hpp"

namespace rcd::control {
namespace {

// Symmetry and eigenvalue-sign checks shared by WeightSpec and solve_care.
// strict demands positive definiteness, otherwise eigenvalues >= -1e-12 scaled.
void check_weight_matrix(const Eigen::MatrixXd& m, const char* name, bool strict) {
  if (m.rows() == 0 || m.rows() != m.cols())
    throw ValidationError(std::string(name) + " must be a nonempty square matrix");
  if (!m.allFinite()) throw ValidationError(std::string(name) + " has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ValidationError(std::string(name) + " must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()),
                                                    Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  if (strict && lo <= 0.0)
    throw ValidationError(std::string(name) + " must be positive definite");
  if (!strict && lo < -1e-12 * scale)
    throw ValidationError(std::string(name) + " must be nonnegative definite");
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Solves acl' x + x acl = -rhs for symmetric x by the Kronecker-expanded
// linear system; fine at the n <= 5 sizes this module sees.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& acl, const Eigen::MatrixXd& rhs) {
  const Eigen::Index n = acl.rows();
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k) {
        big(j * n + i, j * n + k) += acl(k, i);  // (acl' x) term
        big(j * n + i, k * n + i) += acl(k, j);  // (x acl) term
      }
  Eigen::VectorXd vec_rhs(n * n);
  for (Eigen::Index j = 0; j < n; ++j) vec_rhs.segment(j * n, n) = -rhs.col(j);
  const Eigen::VectorXd sol = big.partialPivLu().solve(vec_rhs);
  if (!sol.allFinite()) throw SolverError("lyapunov solve produced non-finite values");
  Eigen::MatrixXd x(n, n);
  for (Eigen::Index j = 0; j < n; ++j) x.col(j) = sol.segment(j * n, n);
  return symmetrize(x);
}

double care_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& s,
                     const Eigen::MatrixXd& q, const Eigen::MatrixXd& p) {
  return (a.transpose() * p + p * a - p * s * p + q).norm();
}

}  // namespace

WeightSpec::WeightSpec(Eigen::MatrixXd q_in, Eigen::MatrixXd r_in)
    : q(std::move(q_in)), r(std::move(r_in)) {
  check_weight_matrix(q, "q", false);
  check_weight_matrix(r, "r", true);
}

TrackingTask::TrackingTask(TrackingMode mode_in, double reference_in,
                           Eigen::RowVectorXd c_row_in, double duration_in, int n_steps_in)
    : mode(mode_in),
      reference(reference_in),
      c_row(std::move(c_row_in)),
      duration(duration_in),
      n_steps(n_steps_in) {
  if (!std::isfinite(reference)) throw ValidationError("tracking reference must be finite");
  if (c_row.size() == 0 || !c_row.allFinite() || c_row.isZero(0.0))
    throw ValidationError("c_row must be a nonzero finite output selector");
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw ValidationError("tracking duration must be positive");
  if (n_steps < 1) throw ValidationError("tracking n_steps must be at least 1");
}

double l2_norm(const std::vector<Eigen::VectorXd>& signal, double dt) {
  if (signal.empty()) throw ValidationError("l2_norm needs a nonempty signal");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("l2_norm needs dt > 0");
  const Eigen::Index dim = signal.front().size();
  if (signal.size() == 1) return 0.0;  // spans zero time
  double sum = 0.0;
  for (std::size_t k = 0; k < signal.size(); ++k) {
    if (signal[k].size() != dim)
      throw ValidationError("l2_norm signal entries must share one dimension");
    const double sq = signal[k].squaredNorm();
    const bool endpoint = (k == 0 || k + 1 == signal.size());
    sum += (endpoint ? 0.5 : 1.0) * sq;
  }
  return std::sqrt(sum * dt);
}

Eigen::MatrixXd solve_care(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           const Eigen::MatrixXd& q, const Eigen::MatrixXd& r) {
  const Eigen::Index n = a.rows();
  if (n == 0 || a.cols() != n) throw ValidationError("care: a must be square");
  if (b.rows() != n) throw ValidationError("care: b must have as many rows as a");
  if (q.rows() != n || q.cols() != n) throw ValidationError("care: q must match a");
  if (r.rows() != b.cols() || r.cols() != b.cols())
    throw ValidationError("care: r must match the input count");
  if (!a.allFinite() || !b.allFinite()) throw ValidationError("care: non-finite system");
  check_weight_matrix(q, "q", false);
  check_weight_matrix(r, "r", true);

  const Eigen::LLT<Eigen::MatrixXd> r_llt(r);
  const Eigen::MatrixXd s = b * r_llt.solve(b.transpose());

  Eigen::MatrixXd ham(2 * n, 2 * n);
  ham << a, -s, -q, -a.transpose();
  Eigen::EigenSolver<Eigen::MatrixXd> ces(ham);
  if (ces.info() != Eigen::Success) throw SolverError("care: hamiltonian eigensolve failed");

  // The spectrum is symmetric about the imaginary axis; a stabilizing solution
  // needs exactly n strictly stable eigenvalues (the split fails for
  // non-stabilizable pairs or imaginary-axis modes).
  const auto& vals = ces.eigenvalues();
  const double tol = 1e-9 * std::max(1.0, vals.cwiseAbs().maxCoeff());
  std::vector<Eigen::Index> order(static_cast<std::size_t>(2 * n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index l, Eigen::Index rr) { return vals[l].real() < vals[rr].real(); });
  Eigen::Index stable = 0;
  for (Eigen::Index i = 0; i < 2 * n; ++i)
    if (vals[i].real() < -tol) ++stable;
  if (stable != n)
    throw SolverError("care: spectral split failed; the pair is likely not stabilizable");

  Eigen::MatrixXcd x1(n, n);
  Eigen::MatrixXcd x2(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    x1.col(k) = ces.eigenvectors().col(order[static_cast<std::size_t>(k)]).head(n);
    x2.col(k) = ces.eigenvectors().col(order[static_cast<std::size_t>(k)]).tail(n);
  }
  const Eigen::FullPivLU<Eigen::MatrixXcd> lu(x1);
  if (!lu.isInvertible())
    throw SolverError("care: stable subspace is vertical; the pair is not stabilizable");
  Eigen::MatrixXd p = symmetrize((x2 * lu.inverse()).real());

  // Newton refinement: each pass solves the Lyapunov equation for the current
  // closed loop, converging quadratically from the subspace estimate.
  for (int iter = 0; iter < 25; ++iter) {
    if (care_residual(a, s, q, p) < 1e-10 * (1.0 + p.norm())) break;
    const Eigen::MatrixXd k = r_llt.solve(b.transpose() * p);
    const Eigen::MatrixXd acl = a - b * k;
    p = solve_lyapunov(acl, q + k.transpose() * r * k);
  }

  if (!p.allFinite() || care_residual(a, s, q, p) >= 1e-8 * (1.0 + p.norm()))
    throw SolverError("care: residual did not converge");
  const Eigen::MatrixXd acl = a - s * p;
  const Eigen::EigenSolver<Eigen::MatrixXd> acl_eig(acl, false);
  if (acl_eig.eigenvalues().real().maxCoeff() >= 0.0)
    throw SolverError("care: closed loop is not Hurwitz");
  return p;
}

TrackingSchedule solve_lq_tracking(const lti::LtiSystem& sys, const WeightSpec& weights,
                                   const std::vector<Eigen::VectorXd>& x_ref,
                                   const lti::TimeGrid& grid) {
  const Eigen::Index n = sys.states();
  const Eigen::Index m = sys.inputs();
  check_weight_matrix(weights.q, "q", false);
  check_weight_matrix(weights.r, "r", true);
  if (weights.q.rows() != n) throw ValidationError("tracking: q must match the state count");
  if (weights.r.rows() != m) throw ValidationError("tracking: r must match the input count");
  if (x_ref.size() != static_cast<std::size_t>(grid.n_steps) + 1)
    throw ValidationError("tracking: x_ref needs n_steps + 1 grid-node states");
  for (const auto& xr : x_ref)
    if (xr.size() != n || !xr.allFinite())
      throw ValidationError("tracking: x_ref states must be finite with the state dimension");

  const double dt = grid.dt();
  auto ref_at = [&](double t) -> Eigen::VectorXd {
    const double pos = std::clamp((t - grid.t0) / dt, 0.0, static_cast<double>(grid.n_steps));
    const auto i = std::min(static_cast<std::size_t>(pos), static_cast<std::size_t>(grid.n_steps - 1));
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * x_ref[i] + w * x_ref[i + 1];
  };

  const Eigen::LLT<Eigen::MatrixXd> r_llt(weights.r);
  const Eigen::MatrixXd s = sys.b * r_llt.solve(sys.b.transpose());
  const Eigen::MatrixXd at = sys.a.transpose();

  auto p_dot = [&](const Eigen::MatrixXd& p) -> Eigen::MatrixXd {
    return at * p + p * sys.a - p * s * p + weights.q;
  };
  // Backward variable tau = t_final - t, so both tables fill from the terminal
  // condition; adj uses the concurrent Riccati iterate at each substage.
  auto adj_dot = [&](const Eigen::MatrixXd& p, const Eigen::VectorXd& v, double tau) {
    return ((sys.a - s * p).transpose() * v + weights.q * ref_at(grid.t_final - tau)).eval();
  };

  const int half_steps = 2 * grid.n_steps;
  const double h = 0.5 * dt;
  TrackingSchedule sched;
  sched.p.resize(static_cast<std::size_t>(half_steps) + 1);
  sched.adjoint.resize(static_cast<std::size_t>(half_steps) + 1);

  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd adj = Eigen::VectorXd::Zero(n);
  sched.p[static_cast<std::size_t>(half_steps)] = p;
  sched.adjoint[static_cast<std::size_t>(half_steps)] = adj;
  for (int j = 0; j < half_steps; ++j) {
    const double tau = j * h;
    const Eigen::MatrixXd k1p = p_dot(p);
    const Eigen::VectorXd k1v = adj_dot(p, adj, tau);
    const Eigen::MatrixXd k2p = p_dot(p + 0.5 * h * k1p);
    const Eigen::VectorXd k2v = adj_dot(p + 0.5 * h * k1p, adj + 0.5 * h * k1v, tau + 0.5 * h);
    const Eigen::MatrixXd k3p = p_dot(p + 0.5 * h * k2p);
    const Eigen::VectorXd k3v = adj_dot(p + 0.5 * h * k2p, adj + 0.5 * h * k2v, tau + 0.5 * h);
    const Eigen::MatrixXd k4p = p_dot(p + h * k3p);
    const Eigen::VectorXd k4v = adj_dot(p + h * k3p, adj + h * k3v, tau + h);
    p = symmetrize(p + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p));
    adj += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    if (!p.allFinite() || !adj.allFinite() || p.norm() > 1e12)
      throw SolverError("tracking: riccati solution exceeded 1e12; horizon too long");
    sched.p[static_cast<std::size_t>(half_steps - j - 1)] = p;
    sched.adjoint[static_cast<std::size_t>(half_steps - j - 1)] = adj;
  }
  return sched;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> augment_integrator(const Eigen::MatrixXd& a,
                                                               const Eigen::MatrixXd& b,
                                                               const Eigen::RowVectorXd& c_row) {
  const Eigen::Index n = a.rows();
  if (n == 0 || a.cols() != n) throw ValidationError("augment: a must be square");
  if (b.rows() != n) throw ValidationError("augment: b must have as many rows as a");
  if (c_row.size() != n) throw ValidationError("augment: c_row must match the state count");
  if (!a.allFinite() || !b.allFinite() || !c_row.allFinite())
    throw ValidationError("augment: non-finite entries");
  Eigen::MatrixXd a_hat = Eigen::MatrixXd::Zero(n + 1, n + 1);
  a_hat.topLeftCorner(n, n) = a;
  a_hat.row(n).head(n) = c_row;
  Eigen::MatrixXd b_hat = Eigen::MatrixXd::Zero(n + 1, b.cols());
  b_hat.topRows(n) = b;
  return {a_hat, b_hat};
}

namespace {

// Steps counted saturated when any recorded input component sits on the box
// boundary; with clip-then-integrate that is exactly the clipping-active set
// (plus measure-zero exact landings).
double boundary_fraction(const std::vector<Eigen::VectorXd>& inputs, const Eigen::VectorXd& lo,
                         const Eigen::VectorXd& hi) {
  if (inputs.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& u : inputs) {
    bool contact = false;
    for (Eigen::Index i = 0; i < u.size(); ++i)
      if (u[i] == lo[i] || u[i] == hi[i]) contact = true;
    if (contact) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(inputs.size());
}

Eigen::VectorXd clip_to(const Eigen::VectorXd& u, const Eigen::VectorXd& lo,
                        const Eigen::VectorXd& hi) {
  return u.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace

std::pair<lti::Trajectory, PerformanceReport> simulate_linear_tracking(
    const lti::LtiSystem& sys, const reach::InputBox& box, const TrackingTask& task,
    const WeightSpec& weights, const lti::TimeGrid& grid, const Eigen::VectorXd& x0) {
  const Eigen::Index n = sys.states();
  const Eigen::Index m = sys.inputs();
  if (box.lower.size() != m) throw ValidationError("tracking: box must match the input count");
  if (task.c_row.size() != n) throw ValidationError("tracking: c_row must match the state count");
  if (task.mode == TrackingMode::kNonlinearLqi)
    throw ValidationError("tracking: nonlinear mode needs simulate_nonlinear_tracking");
  Eigen::VectorXd start = x0;
  if (start.size() == 0) start = Eigen::VectorXd::Zero(n);
  if (start.size() != n || !start.allFinite())
    throw ValidationError("tracking: x0 must be finite with the state dimension");

  // Least-norm state target with c_row * x_ref = reference; for the unit
  // selector rows used here this puts the reference in the tracked channel.
  const Eigen::VectorXd x_target =
      task.c_row.transpose() * (task.reference / task.c_row.squaredNorm());

  const double dt = grid.dt();
  const std::size_t n_nodes = static_cast<std::size_t>(grid.n_steps) + 1;
  lti::Trajectory traj;
  traj.times.resize(n_nodes);
  traj.states.resize(n_nodes);
  traj.inputs.resize(n_nodes);
  for (std::size_t k = 0; k < n_nodes; ++k)
    traj.times[k] = grid.t0 + static_cast<double>(k) * dt;

  const Eigen::LLT<Eigen::MatrixXd> r_llt(weights.r);

  if (task.mode == TrackingMode::kLqFinite) {
    const std::vector<Eigen::VectorXd> x_ref(n_nodes, x_target);
    const TrackingSchedule sched = solve_lq_tracking(sys, weights, x_ref, grid);
    auto command = [&](std::size_t half_idx, const Eigen::VectorXd& x) -> Eigen::VectorXd {
      return clip_to(
          -r_llt.solve(sys.b.transpose() * (sched.p[half_idx] * x - sched.adjoint[half_idx])),
          box.lower, box.upper);
    };
    auto rhs = [&](std::size_t half_idx, const Eigen::VectorXd& x) -> Eigen::VectorXd {
      return sys.a * x + sys.b * command(half_idx, x);
    };
    Eigen::VectorXd x = start;
    for (std::size_t k = 0; k + 1 < n_nodes; ++k) {
      traj.states[k] = x;
      traj.inputs[k] = command(2 * k, x);
      const Eigen::VectorXd k1 = rhs(2 * k, x);
      const Eigen::VectorXd k2 = rhs(2 * k + 1, x + 0.5 * dt * k1);
      const Eigen::VectorXd k3 = rhs(2 * k + 1, x + 0.5 * dt * k2);
      const Eigen::VectorXd k4 = rhs(2 * k + 2, x + dt * k3);
      x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!x.allFinite() || x.norm() > 1e12)
        throw NumericalError("tracking: linear simulation state blew up");
    }
    traj.states[n_nodes - 1] = x;
    traj.inputs[n_nodes - 1] = command(2 * static_cast<std::size_t>(grid.n_steps), x);
  } else {
    if (weights.q.rows() != n + 1)
      throw ValidationError("tracking: lqi mode needs q sized for the augmented state");
    const auto [a_hat, b_hat] = augment_integrator(sys.a, sys.b, task.c_row);
    const Eigen::MatrixXd p_hat = solve_care(a_hat, b_hat, weights.q, weights.r);
    const Eigen::MatrixXd gain = r_llt.solve(b_hat.transpose() * p_hat);
    Eigen::VectorXd forcing = Eigen::VectorXd::Zero(n + 1);
    forcing[n] = -task.reference;
    auto command = [&](const Eigen::VectorXd& xh) -> Eigen::VectorXd {
      return clip_to(-gain * xh, box.lower, box.upper);
    };
    auto rhs = [&](const Eigen::VectorXd& xh) -> Eigen::VectorXd {
      return a_hat * xh + b_hat * command(xh) + forcing;
    };
    Eigen::VectorXd xh = Eigen::VectorXd::Zero(n + 1);
    xh.head(n) = start;
    for (std::size_t k = 0; k + 1 < n_nodes; ++k) {
      traj.states[k] = xh.head(n);
      traj.inputs[k] = command(xh);
      const Eigen::VectorXd k1 = rhs(xh);
      const Eigen::VectorXd k2 = rhs(xh + 0.5 * dt * k1);
      const Eigen::VectorXd k3 = rhs(xh + 0.5 * dt * k2);
      const Eigen::VectorXd k4 = rhs(xh + dt * k3);
      xh += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!xh.allFinite() || xh.norm() > 1e12)
        throw NumericalError("tracking: linear simulation state blew up");
    }
    traj.states[n_nodes - 1] = xh.head(n);
    traj.inputs[n_nodes - 1] = command(xh);
  }

  PerformanceReport report;
  std::vector<Eigen::VectorXd> out_err(n_nodes);
  for (std::size_t k = 0; k < n_nodes; ++k) {
    out_err[k] = Eigen::VectorXd::Constant(1, task.c_row.dot(traj.states[k]) - task.reference);
  }
  report.tracking_error_l2 = l2_norm(out_err, dt);
  report.control_cost_l2 = l2_norm(traj.inputs, dt);
  report.state_error_l2.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<Eigen::VectorXd> err(n_nodes);
    for (std::size_t k = 0; k < n_nodes; ++k)
      err[k] = Eigen::VectorXd::Constant(1, traj.states[k][i] - x_target[i]);
    report.state_error_l2[static_cast<std::size_t>(i)] = l2_norm(err, dt);
  }
  report.saturation_fraction = boundary_fraction(traj.inputs, box.lower, box.upper);
  return {std::move(traj), report};
}

std::vector<ManeuverPhase> climb_then_cruise() {
  return {{190.0, 10.0 * std::numbers::pi / 180.0, 20.0}, {210.0, 0.0, 20.0}};
}

std::pair<lti::Trajectory, PerformanceReport> simulate_nonlinear_tracking(
    const flight::Design& design, const aero::AeroTable& table,
    const aero::AircraftParams& params, const std::vector<ManeuverPhase>& phases,
    const WeightSpec& weights, const lti::TimeGrid& grid, const Eigen::VectorXd& x0) {
  if (phases.empty()) throw ValidationError("maneuver: needs at least one phase");
  double total = 0.0;
  for (const auto& ph : phases) {
    if (!(ph.duration > 0.0) || !std::isfinite(ph.duration) || !std::isfinite(ph.airspeed) ||
        !std::isfinite(ph.gamma))
      throw ValidationError("maneuver: phases need positive durations and finite targets");
    total += ph.duration;
  }
  if (std::abs(total - (grid.t_final - grid.t0)) > 1e-9)
    throw ValidationError("maneuver: grid span must equal the total phase duration");
  if (weights.q.rows() != 5 || weights.r.rows() != 2)
    throw ValidationError("maneuver: weights must be 5-state q and 2-input r");
  check_weight_matrix(weights.q, "q", false);
  check_weight_matrix(weights.r, "r", true);

  const double dt = grid.dt();
  const Eigen::LLT<Eigen::MatrixXd> r_llt(weights.r);
  Eigen::RowVectorXd pitch_row(4);
  pitch_row << 0.0, 0.0, 0.0, 1.0;  // integrator accumulates pitch deviation

  struct PhaseLaw {
    Eigen::Vector4d x_trim;
    Eigen::Vector2d u_trim;
    Eigen::MatrixXd gain;  // 2x5 on [x - x_trim; z]
    std::size_t end_step;
  };
  std::vector<PhaseLaw> laws(phases.size());
  double elapsed = 0.0;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const flight::TrimPoint tp =
        flight::trim(design, table, params, phases[i].airspeed, phases[i].gamma);
    const flight::LinearModel lm = flight::linearize(design, table, params, tp);
    const auto [a_hat, b_hat] = augment_integrator(lm.system.a, lm.system.b, pitch_row);
    const Eigen::MatrixXd p_hat = solve_care(a_hat, b_hat, weights.q, weights.r);
    laws[i].gain = r_llt.solve(b_hat.transpose() * p_hat);
    laws[i].x_trim << tp.v0, tp.alpha0, tp.q0, tp.theta0;
    laws[i].u_trim << tp.dth0, tp.de0;
    elapsed += phases[i].duration;
    laws[i].end_step = static_cast<std::size_t>(std::llround(elapsed / dt));
  }
  laws.back().end_step = static_cast<std::size_t>(grid.n_steps);

  Eigen::Vector4d state;
  if (x0.size() == 0) {
    const flight::TrimPoint level =
        flight::trim(design, table, params, phases.front().airspeed, 0.0);
    state << level.v0, level.alpha0, level.q0, level.theta0;
  } else if (x0.size() == 4 && x0.allFinite()) {
    state = x0;
  } else {
    throw ValidationError("maneuver: x0 must have the four physical states");
  }

  const Eigen::Vector2d u_lo(0.0, -flight::kElevatorLimit);
  const Eigen::Vector2d u_hi(1.0, flight::kElevatorLimit);
  auto command = [&](const PhaseLaw& law, const Eigen::Vector4d& x, double z) -> Eigen::Vector2d {
    Eigen::VectorXd dev(5);
    dev.head<4>() = x - law.x_trim;
    dev[4] = z;
    const Eigen::Vector2d raw = law.u_trim - law.gain * dev;
    return raw.cwiseMax(u_lo).cwiseMin(u_hi);
  };
  // 5th integration channel is the pitch integrator z. Aero queries clamp to
  // the table envelope: the climb entry transient swings alpha past the
  // sampled range and the run should degrade gracefully there, not abort.
  auto rhs = [&](const PhaseLaw& law, const Eigen::Matrix<double, 5, 1>& xz) {
    const Eigen::Vector4d x = xz.head<4>();
    const Eigen::Vector2d u = command(law, x, xz[4]);
    Eigen::Matrix<double, 5, 1> d;
    d.head<4>() = flight::nonlinear_rhs_clamped(x, u, design, table, params);
    d[4] = x[3] - law.x_trim[3];
    return d;
  };

  const std::size_t n_nodes = static_cast<std::size_t>(grid.n_steps) + 1;
  lti::Trajectory traj;
  traj.times.resize(n_nodes);
  traj.states.resize(n_nodes);
  traj.inputs.resize(n_nodes);
  std::vector<Eigen::VectorXd> dev(n_nodes);
  std::vector<Eigen::VectorXd> du(n_nodes);

  Eigen::Matrix<double, 5, 1> xz;
  xz.head<4>() = state;
  xz[4] = 0.0;
  std::size_t phase_idx = 0;
  for (std::size_t k = 0; k < n_nodes; ++k) {
    while (phase_idx + 1 < laws.size() && k >= laws[phase_idx].end_step) {
      ++phase_idx;
      xz[4] = 0.0;  // fresh integrator for the incoming controller
    }
    const PhaseLaw& law = laws[phase_idx];
    traj.times[k] = grid.t0 + static_cast<double>(k) * dt;
    traj.states[k] = xz.head<4>();
    const Eigen::Vector2d u = command(law, xz.head<4>(), xz[4]);
    traj.inputs[k] = u;
    dev[k] = xz.head<4>() - law.x_trim;
    du[k] = u - law.u_trim;
    if (k + 1 == n_nodes) break;
    const Eigen::Matrix<double, 5, 1> k1 = rhs(law, xz);
    const Eigen::Matrix<double, 5, 1> k2 = rhs(law, xz + 0.5 * dt * k1);
    const Eigen::Matrix<double, 5, 1> k3 = rhs(law, xz + 0.5 * dt * k2);
    const Eigen::Matrix<double, 5, 1> k4 = rhs(law, xz + dt * k3);
    xz += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!xz.allFinite() || xz.norm() > 1e9)
      throw NumericalError("maneuver: nonlinear simulation state blew up");
  }

  PerformanceReport report;
  report.tracking_error_l2 = l2_norm(dev, dt);
  report.control_cost_l2 = l2_norm(du, dt);
  report.state_error_l2.resize(4);
  for (Eigen::Index i = 0; i < 4; ++i) {
    std::vector<Eigen::VectorXd> chan(n_nodes);
    for (std::size_t k = 0; k < n_nodes; ++k)
      chan[k] = Eigen::VectorXd::Constant(1, dev[k][i]);
    report.state_error_l2[static_cast<std::size_t>(i)] = l2_norm(chan, dt);
  }
  report.saturation_fraction = boundary_fraction(traj.inputs, u_lo, u_hi);
  return {std::move(traj), report};
}

}  // namespace rcd::control
