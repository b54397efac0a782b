#include "rcd/flight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rcd/errors.hpp"

namespace rcd::flight {

Design::Design(double c_in, double w_in) : c(c_in), w(w_in) {
  if (!std::isfinite(c) || !std::isfinite(w))
    throw ValidationError("design values must be finite");
  const double slack = 1e-9;
  if (c < kCenterMin - slack || c > kCenterMax + slack || w < kWingMin - slack ||
      w > kWingMax + slack)
    throw ValidationError("design outside the box [3, 7] x [10, 20] m");
}

namespace {

Eigen::Vector4d combine_rhs(const Eigen::Vector4d& state, const Eigen::Vector2d& inputs,
                            const aero::AeroForces& f, const aero::AircraftParams& params) {
  const double v = state[0], alpha = state[1], q = state[2], theta = state[3];
  const double f_th = inputs[0] * params.max_thrust;
  const double gamma = theta - alpha;
  Eigen::Vector4d dot;
  dot[0] = f_th * std::cos(alpha) / params.mass - f.drag / params.mass -
           params.g * std::sin(gamma);
  dot[1] = -f_th * std::sin(alpha) / (params.mass * v) - f.lift / (params.mass * v) +
           params.g * std::cos(gamma) / v + q;
  dot[2] = (f.moment + f_th * params.thrust_moment_arm) / params.j_y;
  dot[3] = q;
  return dot;
}

}  // namespace

Eigen::Vector4d nonlinear_rhs(const Eigen::Vector4d& state, const Eigen::Vector2d& inputs,
                              const Design& design, const aero::AeroTable& table,
                              const aero::AircraftParams& params) {
  if (!(state[0] > 0.0)) throw ValidationError("airspeed must be positive");
  const aero::AeroForces f =
      aero::interpolate(table, state[0], state[1], design.c, design.w, inputs[1]);
  return combine_rhs(state, inputs, f, params);
}

Eigen::Vector4d nonlinear_rhs_clamped(const Eigen::Vector4d& state, const Eigen::Vector2d& inputs,
                                      const Design& design, const aero::AeroTable& table,
                                      const aero::AircraftParams& params) {
  if (!(state[0] > 0.0)) throw ValidationError("airspeed must be positive");
  const aero::AeroForces f =
      aero::interpolate_clamped(table, state[0], state[1], design.c, design.w, inputs[1]);
  return combine_rhs(state, inputs, f, params);
}

namespace {

// Trim unknowns y = (alpha, delta_e, delta_th, theta) and the residual
// (V_dot, alpha_dot, Q_dot, theta - alpha - gamma) at (v0, alpha, 0, theta).
Eigen::Vector4d trim_residual(const Eigen::Vector4d& y, const Design& design,
                              const aero::AeroTable& table, const aero::AircraftParams& params,
                              double v0, double gamma) {
  const Eigen::Vector4d state(v0, y[0], 0.0, y[3]);
  const Eigen::Vector2d inputs(y[2], y[1]);
  const Eigen::Vector4d dot = nonlinear_rhs(state, inputs, design, table, params);
  return {dot[0], dot[1], dot[2], y[3] - y[0] - gamma};
}

// Clip the Newton iterate so force probes stay inside the table: alpha and
// delta_e keep a margin inside their axes (wide enough for the Jacobian
// steps), throttle stays physical. kFdStep is the central-difference step of
// the 4x4 Jacobians.
constexpr double kFdStep = 1e-5;
constexpr double kAxisMargin = 2e-4;

Eigen::Vector4d clip_iterate(const Eigen::Vector4d& y, const aero::AeroAxes& axes) {
  Eigen::Vector4d out = y;
  out[0] = std::clamp(out[0], axes.alpha.front() + kAxisMargin, axes.alpha.back() - kAxisMargin);
  out[1] = std::clamp(out[1], axes.delta_e.front() + kAxisMargin,
                      axes.delta_e.back() - kAxisMargin);
  out[2] = std::clamp(out[2], 0.0, 1.0);
  return out;
}

Eigen::Matrix4d residual_jacobian(const Eigen::Vector4d& y, const Design& design,
                                  const aero::AeroTable& table,
                                  const aero::AircraftParams& params, double v0, double gamma) {
  Eigen::Matrix4d jac;
  for (int j = 0; j < 4; ++j) {
    Eigen::Vector4d hi = y, lo = y;
    hi[j] += kFdStep;
    lo[j] -= kFdStep;
    jac.col(j) = (trim_residual(hi, design, table, params, v0, gamma) -
                  trim_residual(lo, design, table, params, v0, gamma)) /
                 (2.0 * kFdStep);
  }
  // the constraint row is linear in y; enter it exactly
  jac.row(3) << -1.0, 0.0, 0.0, 1.0;
  return jac;
}

}  // namespace

TrimPoint trim(const Design& design, const aero::AeroTable& table,
               const aero::AircraftParams& params, double v0, double gamma) {
  const auto& axes = table.axes;
  if (v0 < axes.v.front() || v0 > axes.v.back())
    throw ValidationError("trim airspeed outside the table V axis");
  if (!std::isfinite(gamma)) throw ValidationError("path angle must be finite");

  constexpr double kTol = 1e-8;
  constexpr int kMaxIter = 50;
  Eigen::Vector4d y(0.05, 0.0, 0.5, 0.05 + gamma);
  y = clip_iterate(y, axes);
  Eigen::Vector4d res = trim_residual(y, design, table, params, v0, gamma);

  int iter = 0;
  for (; iter < kMaxIter && res.cwiseAbs().maxCoeff() >= kTol; ++iter) {
    const Eigen::Matrix4d jac = residual_jacobian(y, design, table, params, v0, gamma);
    const Eigen::Vector4d step = jac.partialPivLu().solve(-res);
    if (!step.allFinite()) throw TrimFailure("trim Newton step is not finite", res.cwiseAbs().maxCoeff());
    y = clip_iterate(y + step, axes);
    res = trim_residual(y, design, table, params, v0, gamma);
  }
  const double res_norm = res.cwiseAbs().maxCoeff();
  if (res_norm >= kTol)
    throw TrimFailure("trim did not converge in " + std::to_string(kMaxIter) + " iterations",
                      res_norm);

  constexpr double kBoundTol = 1e-3;
  if (y[2] <= kBoundTol || y[2] >= 1.0 - kBoundTol)
    throw SaturatedTrim("trim throttle " + std::to_string(y[2]) + " sits on a physical bound");
  if (std::abs(y[1]) >= kElevatorLimit - kBoundTol)
    throw SaturatedTrim("trim elevator " + std::to_string(y[1]) + " sits on a physical bound");

  TrimPoint point;
  point.v0 = v0;
  double alpha0 = y[0];
  const double theta0 = alpha0 + gamma;
  // enforce theta0 - alpha0 == gamma bitwise where the floating-point grids
  // allow it; the sub-ulp nudge of alpha is far below the residual tolerance
  const double defect = (theta0 - alpha0) - gamma;
  if (defect != 0.0 && ((theta0 - (alpha0 + defect)) - gamma) == 0.0) alpha0 += defect;
  point.alpha0 = alpha0;
  point.q0 = 0.0;
  point.theta0 = theta0;
  point.dth0 = y[2];
  point.de0 = y[1];
  point.gamma0 = gamma;
  point.residual_norm = res_norm;
  return point;
}

Eigen::Matrix4d trim_jacobian(const Design& design, const aero::AeroTable& table,
                              const aero::AircraftParams& params, const TrimPoint& trim) {
  const Eigen::Vector4d y(trim.alpha0, trim.de0, trim.dth0, trim.theta0);
  return residual_jacobian(y, design, table, params, trim.v0, trim.gamma0);
}

RegularityReport check_trim_regularity(const Eigen::Matrix4d& jac) {
  if (!jac.allFinite()) throw ValidationError("trim Jacobian must be finite");
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(jac);
  const double smax = svd.singularValues()[0];
  const double smin = svd.singularValues()[3];
  RegularityReport report;
  report.invertible = smin > 1e-10 * smax;
  report.condition_number =
      smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  return report;
}

LinearModel linearize(const Design& design, const aero::AeroTable& table,
                      const aero::AircraftParams& params, const TrimPoint& trim) {
  const aero::StabilityDerivatives sd = aero::stability_derivatives(table, design, trim);
  const double v0 = trim.v0;
  const double g = params.g;
  const double cg = std::cos(trim.gamma0);
  const double sg = std::sin(trim.gamma0);

  Eigen::MatrixXd a(4, 4), b(4, 2);
  a << sd.x_v, sd.x_alpha + g * cg, 0.0, -g * cg,
      sd.z_v / v0, sd.z_alpha / v0 + g * sg / v0, 1.0, -g * sg / v0,
      sd.m_v, sd.m_alpha, sd.m_q, 0.0,
      0.0, 0.0, 1.0, 0.0;
  // thrust tilts with alpha: the alpha-axis force per throttle unit is
  // -F_max sin(alpha0), which is -x_dth tan(alpha0), divided by v0 in the
  // alpha-rate row
  b << sd.x_dth, sd.x_de,
      -sd.x_dth * std::tan(trim.alpha0) / v0, sd.z_de / v0,
      sd.m_dth, sd.m_de,
      0.0, 0.0;

  lti::LtiSystem system(std::move(a), std::move(b), {"V", "alpha", "Q", "theta"},
                        {"delta_th", "delta_e"});
  Eigen::VectorXd lower(2), upper(2);
  lower << -trim.dth0, -kElevatorLimit - trim.de0;
  upper << 1.0 - trim.dth0, kElevatorLimit - trim.de0;
  return {std::move(system), reach::InputBox(std::move(lower), std::move(upper))};
}

}  // namespace rcd::flight
