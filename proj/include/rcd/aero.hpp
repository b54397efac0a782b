#pragma once

#include <cstddef>
#include <vector>

#include "rcd/flight_types.hpp"

namespace rcd::aero {

// Grid axes for the five-parameter force sweep. Every axis must be strictly
// increasing, hold at least two points, and stay inside the documented
// physical ranges (see validate()).
struct AeroAxes {
  std::vector<double> v;        // airspeed, m/s, range [100, 295]
  std::vector<double> alpha;    // angle of attack, rad, range [-0.0873, 0.2618]
  std::vector<double> c;        // center-body half-span, m, range [3, 7]
  std::vector<double> w;        // wing half-span, m, range [10, 20]
  std::vector<double> delta_e;  // elevator deflection, rad, range [-0.523, 0.523]

  void validate() const;  // throws ValidationError

  // Uniformly spaced axes spanning the full physical ranges, `resolution`
  // points each (resolution >= 2).
  static AeroAxes uniform(int resolution = 6);
};

// Physical aircraft constants. Defaults: 350,000 lb takeoff mass, twin
// 48,000 lb engines, cruise air density near 10 km altitude; the pitch
// inertia is a surrogate value of matching scale.
struct AircraftParams {
  double mass = 158757.0;           // kg
  double j_y = 1.5e7;               // kg m^2
  double g = 9.81;                  // m/s^2
  double max_thrust = 427000.0;     // N, both engines combined
  double rho = 0.4135;              // kg/m^3
  double thrust_moment_arm = 0.0;   // m, nose-up moment per unit thrust

  void validate() const;  // throws ValidationError
};

// Constants of the closed-form force model that stands in for a panel-method
// sweep. Planform: span b = 2(c + w), area S = 2(c*chord_center +
// w*chord_wing), aspect ratio AR = b^2/S. Coefficients:
//   C_L = cl0 + C_Lalpha(AR)*alpha + cl_de*delta_e,  C_Lalpha = 2*pi*AR/(AR+2)
//   C_D = cd0 + C_L^2 / (pi*AR*oswald)
//   C_m = cm0 - SM(c)*C_Lalpha*alpha + C_mde(c)*delta_e
// with static margin SM(c) = sm0 + sm1*(c - 5) and elevator effectiveness
// C_mde(c) = cm_de0 + cm_de_slope*(c - 5). Forces are q*S*C with dynamic
// pressure q = rho*V^2/2; the moment is q*S*cbar*C_m with mean chord
// cbar = S/b, taken about the CG, nose-up positive.
struct SurrogateConfig {
  double chord_center = 12.0;  // m, mean chord of the center body
  double chord_wing = 4.0;     // m, mean chord of the outboard panel
  double cl0 = 0.2;
  double cl_de = 0.3;          // 1/rad
  double cd0 = 0.012;
  double oswald = 0.95;
  double cm0 = 0.05;
  double sm0 = 0.10;           // static margin at c = 5 m
  double sm1 = 0.01;           // 1/m
  double cm_de0 = -0.9;        // 1/rad, elevator pitch effectiveness at c = 5 m
  double cm_de_slope = 0.08;   // 1/(rad m)

  void validate() const;  // throws ValidationError
};

struct AeroForces {
  double lift = 0.0;    // N
  double drag = 0.0;    // N
  double moment = 0.0;  // N m, nose-up positive about the CG
};

// Direct closed-form evaluation (no grid involved).
AeroForces surrogate_forces(const SurrogateConfig& config, const AircraftParams& params,
                            double v, double alpha, double c, double w, double delta_e);

// Flat force tables over the axes grid, row-major over (v, alpha, c, w,
// delta_e) in that axis order. Immutable after generation.
struct AeroTable {
  AeroAxes axes;
  std::vector<double> lift;
  std::vector<double> drag;
  std::vector<double> moment;
  SurrogateConfig config;
  AircraftParams params;

  [[nodiscard]] std::size_t flat_index(std::size_t iv, std::size_t ia, std::size_t ic,
                                       std::size_t iw, std::size_t ie) const;
  [[nodiscard]] std::size_t size() const { return lift.size(); }
  void validate() const;  // shape/finiteness checks, throws ValidationError
};

// Fills the grid from the surrogate. The parallel version writes each node
// into its own slot, so its output is bit-identical to the serial reference.
AeroTable generate_table(const AeroAxes& axes, const AircraftParams& params,
                         const SurrogateConfig& config);
AeroTable generate_table_serial(const AeroAxes& axes, const AircraftParams& params,
                                const SurrogateConfig& config);

// Multilinear interpolation over the enclosing grid cell; exact at nodes,
// continuous in the box. Out-of-box queries throw OutOfDomain naming the
// violating axis.
AeroForces interpolate(const AeroTable& table, double v, double alpha, double c, double w,
                       double delta_e);

// interpolate with each query coordinate clamped into its axis range first,
// i.e. constant extrapolation past the sampled envelope. Closed-loop
// simulation uses this so transient excursions beyond the envelope degrade
// gracefully instead of aborting; in-range queries match interpolate exactly.
AeroForces interpolate_clamped(const AeroTable& table, double v, double alpha, double c, double w,
                               double delta_e);

// Central-difference step sizes for stability derivatives.
struct FdSteps {
  double dv = 0.1;      // m/s
  double dalpha = 1e-3; // rad
  double dde = 1e-3;    // rad
};

// Dimensional stability derivatives of the wind-frame force/moment maps
//   X = F_th cos(alpha) - D,  Z = -F_th sin(alpha) - L,  M = M_aero + F_th*arm
// at a trim point, normalized by mass (X, Z rows) and pitch inertia (M row).
// The pitch-rate derivatives are identically zero: the table carries no Q
// dependence.
struct StabilityDerivatives {
  double x_v = 0.0;
  double x_alpha = 0.0;
  double z_v = 0.0;
  double z_alpha = 0.0;
  double m_v = 0.0;
  double m_alpha = 0.0;
  double x_dth = 0.0;
  double x_de = 0.0;
  double z_de = 0.0;
  double m_dth = 0.0;
  double m_de = 0.0;
  double z_q = 0.0;  // identically zero
  double m_q = 0.0;  // identically zero
};

// Central differences of the interpolated maps at the trim point; thrust
// derivatives are closed-form (x_dth = F_max cos(alpha0)/m, m_dth =
// F_max*arm/j_y). Throws OutOfDomain if any probe would leave the table box.
StabilityDerivatives stability_derivatives(const AeroTable& table, const flight::Design& design,
                                           const flight::TrimPoint& trim,
                                           const FdSteps& steps = {});

}  // namespace rcd::aero
