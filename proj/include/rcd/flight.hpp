#pragma once

#include <Eigen/Dense>

#include "rcd/aero.hpp"
#include "rcd/flight_types.hpp"
#include "rcd/lti.hpp"
#include "rcd/reach.hpp"

namespace rcd::flight {

// Longitudinal dynamics. State [V, alpha, Q, theta] (airspeed m/s, angle of
// attack rad, pitch rate rad/s, pitch angle rad); inputs [delta_th, delta_e]
// (throttle fraction, elevator rad). Thrust F = delta_th * max_thrust acts
// along the body x axis; forces come from the interpolated table; gravity
// resolves through the flight-path angle theta - alpha. theta_dot = Q.
// `params` should be the same object the table was generated with; the table
// supplies forces only.
Eigen::Vector4d nonlinear_rhs(const Eigen::Vector4d& state, const Eigen::Vector2d& inputs,
                              const Design& design, const aero::AeroTable& table,
                              const aero::AircraftParams& params);

// Same wiring with the aero query clamped to the table envelope (constant
// extrapolation at the edges) while the kinematic terms keep the true state.
// Closed-loop simulation uses this: aggressive transients can leave the
// sampled alpha range briefly, and freezing the aero coefficients there is
// preferable to aborting the run. Identical to nonlinear_rhs inside the box.
Eigen::Vector4d nonlinear_rhs_clamped(const Eigen::Vector4d& state, const Eigen::Vector2d& inputs,
                                      const Design& design, const aero::AeroTable& table,
                                      const aero::AircraftParams& params);

// Steady flight at airspeed v0 and path angle gamma: Newton iteration on the
// unknowns y = (alpha, delta_e, delta_th, theta) driving the residual
// (V_dot, alpha_dot, Q_dot, theta - alpha - gamma) below 1e-8 in the max
// norm. Iterates are clipped to physical ranges. Throws TrimFailure when 50
// iterations do not converge and SaturatedTrim when the converged inputs sit
// on a physical bound.
TrimPoint trim(const Design& design, const aero::AeroTable& table,
               const aero::AircraftParams& params, double v0, double gamma);

// Jacobian of the trim residual with respect to y at a converged trim,
// by central differences; the constraint row (theta - alpha - gamma) is
// linear and entered exactly as [-1, 0, 0, 1].
Eigen::Matrix4d trim_jacobian(const Design& design, const aero::AeroTable& table,
                              const aero::AircraftParams& params, const TrimPoint& trim);

// Invertibility certificate for the trim Jacobian: the implicit-function
// premise behind finite-difference design gradients of trim-dependent
// quantities.
struct RegularityReport {
  double condition_number = 0.0;  // sigma_max / sigma_min, inf when singular
  bool invertible = false;        // sigma_min > 1e-10 * sigma_max
};
RegularityReport check_trim_regularity(const Eigen::Matrix4d& jac);

// Linearization about a converged trim in deviation coordinates
// x = [dV, dalpha, dQ, dtheta], u = [ddelta_th, ddelta_e], paired with the
// box of input deviations admissible within the physical actuator ranges:
// [-dth0, 1 - dth0] x [-0.523 - de0, 0.523 - de0].
struct LinearModel {
  lti::LtiSystem system;
  reach::InputBox input_box;
};
LinearModel linearize(const Design& design, const aero::AeroTable& table,
                      const aero::AircraftParams& params, const TrimPoint& trim);

// Physical actuator ranges shared by the trim solver and the box above.
constexpr double kElevatorLimit = 0.523;  // rad

}  // namespace rcd::flight
