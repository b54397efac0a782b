#pragma once

namespace rcd::flight {

// Planform design variables: half-spans of the center body and of one
// outboard wing panel, in meters.
struct Design {
  double c = 5.0;
  double w = 12.0;

  Design() = default;
  Design(double c_in, double w_in);  // validates against the design box

  static constexpr double kCenterMin = 3.0;
  static constexpr double kCenterMax = 7.0;
  static constexpr double kWingMin = 10.0;
  static constexpr double kWingMax = 20.0;
};

// Steady-flight operating point: state (v0, alpha0, q0, theta0), inputs
// (dth0, de0), commanded path angle gamma0, and the residual norm the trim
// solver achieved. theta0 - alpha0 == gamma0 and q0 == 0 for a solver-built
// trim; tests sometimes fill the fields by hand.
struct TrimPoint {
  double v0 = 0.0;
  double alpha0 = 0.0;
  double q0 = 0.0;
  double theta0 = 0.0;
  double dth0 = 0.0;
  double de0 = 0.0;
  double gamma0 = 0.0;
  double residual_norm = 0.0;
};

}  // namespace rcd::flight
