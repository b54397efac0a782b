#include "rcd/aero.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "rcd/errors.hpp"
#include "rcd/threading.hpp"

namespace rcd::aero {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct AxisRange {
  double lo;
  double hi;
  const char* name;
};

constexpr AxisRange kVRange{100.0, 295.0, "V"};
constexpr AxisRange kAlphaRange{-0.0873, 0.2618, "alpha"};
constexpr AxisRange kCRange{3.0, 7.0, "c"};
constexpr AxisRange kWRange{10.0, 20.0, "w"};
constexpr AxisRange kDeRange{-0.523, 0.523, "delta_e"};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

void check_axis(const std::vector<double>& axis, const AxisRange& range) {
  const std::string name = range.name;
  if (axis.size() < 2) throw ValidationError("axis " + name + " needs at least 2 points");
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (!std::isfinite(axis[i])) throw ValidationError("axis " + name + " has a non-finite point");
    if (i > 0 && axis[i] <= axis[i - 1])
      throw ValidationError("axis " + name + " must be strictly increasing");
  }
  if (axis.front() < range.lo - 1e-9 || axis.back() > range.hi + 1e-9)
    throw ValidationError("axis " + name + " leaves the physical range [" + fmt(range.lo) +
                          ", " + fmt(range.hi) + "]");
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  out.back() = hi;  // avoid round-off past the physical range
  return out;
}

// Bracketing interval and barycentric coordinate along one axis. Exact at
// nodes: t is 0.0 at every node except the last, where it is exactly 1.0.
struct AxisLocation {
  std::size_t i0;
  double t;
};

AxisLocation locate(const std::vector<double>& axis, double q, const char* name) {
  if (!std::isfinite(q)) throw ValidationError(std::string("query on axis ") + name + " is not finite");
  const double slack = 1e-12 * std::max({1.0, std::abs(axis.front()), std::abs(axis.back())});
  if (q < axis.front() - slack || q > axis.back() + slack)
    throw OutOfDomain(std::string("query outside axis ") + name + ": " + fmt(q) + " not in [" +
                      fmt(axis.front()) + ", " + fmt(axis.back()) + "]");
  auto it = std::upper_bound(axis.begin(), axis.end(), q);
  std::size_t hi = static_cast<std::size_t>(it - axis.begin());
  hi = std::clamp<std::size_t>(hi, 1, axis.size() - 1);
  const std::size_t i0 = hi - 1;
  const double t = std::clamp((q - axis[i0]) / (axis[i0 + 1] - axis[i0]), 0.0, 1.0);
  return {i0, t};
}

}  // namespace

void AeroAxes::validate() const {
  check_axis(v, kVRange);
  check_axis(alpha, kAlphaRange);
  check_axis(c, kCRange);
  check_axis(w, kWRange);
  check_axis(delta_e, kDeRange);
}

AeroAxes AeroAxes::uniform(int resolution) {
  if (resolution < 2) throw ValidationError("axis resolution must be at least 2");
  AeroAxes axes;
  axes.v = linspace(kVRange.lo, kVRange.hi, resolution);
  axes.alpha = linspace(kAlphaRange.lo, kAlphaRange.hi, resolution);
  axes.c = linspace(kCRange.lo, kCRange.hi, resolution);
  axes.w = linspace(kWRange.lo, kWRange.hi, resolution);
  axes.delta_e = linspace(kDeRange.lo, kDeRange.hi, resolution);
  return axes;
}

void AircraftParams::validate() const {
  if (!(mass > 0.0) || !(j_y > 0.0) || !(g > 0.0) || !(max_thrust > 0.0) || !(rho > 0.0))
    throw ValidationError("aircraft parameters must be positive");
  if (!std::isfinite(thrust_moment_arm)) throw ValidationError("thrust moment arm must be finite");
}

void SurrogateConfig::validate() const {
  if (!(chord_center > 0.0) || !(chord_wing > 0.0))
    throw ValidationError("surrogate chord scales must be positive");
  if (!(oswald > 0.0) || !(cd0 > 0.0))
    throw ValidationError("surrogate needs oswald > 0 and cd0 > 0");
  for (double x : {cl0, cl_de, cm0, sm0, sm1, cm_de0, cm_de_slope})
    if (!std::isfinite(x)) throw ValidationError("surrogate constants must be finite");
}

AeroForces surrogate_forces(const SurrogateConfig& config, const AircraftParams& params,
                            double v, double alpha, double c, double w, double delta_e) {
  const double b = 2.0 * (c + w);
  const double s = 2.0 * (c * config.chord_center + w * config.chord_wing);
  const double ar = b * b / s;
  const double cl_alpha = 2.0 * kPi * ar / (ar + 2.0);
  const double cl = config.cl0 + cl_alpha * alpha + config.cl_de * delta_e;
  const double cd = config.cd0 + cl * cl / (kPi * ar * config.oswald);
  const double sm = config.sm0 + config.sm1 * (c - 5.0);
  const double cm_de = config.cm_de0 + config.cm_de_slope * (c - 5.0);
  const double cm = config.cm0 - sm * cl_alpha * alpha + cm_de * delta_e;
  const double q_s = 0.5 * params.rho * v * v * s;
  const double cbar = s / b;
  return {q_s * cl, q_s * cd, q_s * cbar * cm};
}

std::size_t AeroTable::flat_index(std::size_t iv, std::size_t ia, std::size_t ic,
                                  std::size_t iw, std::size_t ie) const {
  return (((iv * axes.alpha.size() + ia) * axes.c.size() + ic) * axes.w.size() + iw) *
             axes.delta_e.size() +
         ie;
}

void AeroTable::validate() const {
  axes.validate();
  params.validate();
  config.validate();
  const std::size_t n = axes.v.size() * axes.alpha.size() * axes.c.size() * axes.w.size() *
                        axes.delta_e.size();
  if (lift.size() != n || drag.size() != n || moment.size() != n)
    throw ValidationError("table arrays do not match the axes product");
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(lift[i]) || !std::isfinite(drag[i]) || !std::isfinite(moment[i]))
      throw ValidationError("table holds a non-finite value");
}

namespace {

AeroTable table_shell(const AeroAxes& axes, const AircraftParams& params,
                      const SurrogateConfig& config) {
  axes.validate();
  params.validate();
  config.validate();
  AeroTable t;
  t.axes = axes;
  t.params = params;
  t.config = config;
  const std::size_t n = axes.v.size() * axes.alpha.size() * axes.c.size() * axes.w.size() *
                        axes.delta_e.size();
  t.lift.resize(n);
  t.drag.resize(n);
  t.moment.resize(n);
  return t;
}

void fill_node(AeroTable& t, std::size_t idx) {
  const std::size_t ne = t.axes.delta_e.size();
  const std::size_t nw = t.axes.w.size();
  const std::size_t nc = t.axes.c.size();
  const std::size_t na = t.axes.alpha.size();
  std::size_t rest = idx;
  const std::size_t ie = rest % ne;
  rest /= ne;
  const std::size_t iw = rest % nw;
  rest /= nw;
  const std::size_t ic = rest % nc;
  rest /= nc;
  const std::size_t ia = rest % na;
  const std::size_t iv = rest / na;
  const AeroForces f =
      surrogate_forces(t.config, t.params, t.axes.v[iv], t.axes.alpha[ia], t.axes.c[ic],
                       t.axes.w[iw], t.axes.delta_e[ie]);
  t.lift[idx] = f.lift;
  t.drag[idx] = f.drag;
  t.moment[idx] = f.moment;
}

}  // namespace

AeroTable generate_table(const AeroAxes& axes, const AircraftParams& params,
                         const SurrogateConfig& config) {
  AeroTable t = table_shell(axes, params, config);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(t.size());
#pragma omp parallel for schedule(static) num_threads(rcd::max_threads())
  for (std::ptrdiff_t idx = 0; idx < n; ++idx) fill_node(t, static_cast<std::size_t>(idx));
  return t;
}

AeroTable generate_table_serial(const AeroAxes& axes, const AircraftParams& params,
                                const SurrogateConfig& config) {
  AeroTable t = table_shell(axes, params, config);
  for (std::size_t idx = 0; idx < t.size(); ++idx) fill_node(t, idx);
  return t;
}

AeroForces interpolate(const AeroTable& table, double v, double alpha, double c, double w,
                       double delta_e) {
  const AxisLocation lv = locate(table.axes.v, v, "V");
  const AxisLocation la = locate(table.axes.alpha, alpha, "alpha");
  const AxisLocation lc = locate(table.axes.c, c, "c");
  const AxisLocation lw = locate(table.axes.w, w, "w");
  const AxisLocation le = locate(table.axes.delta_e, delta_e, "delta_e");

  AeroForces out;
  for (int corner = 0; corner < 32; ++corner) {
    const int bv = (corner >> 4) & 1;
    const int ba = (corner >> 3) & 1;
    const int bc = (corner >> 2) & 1;
    const int bw = (corner >> 1) & 1;
    const int be = corner & 1;
    const double weight = (bv ? lv.t : 1.0 - lv.t) * (ba ? la.t : 1.0 - la.t) *
                          (bc ? lc.t : 1.0 - lc.t) * (bw ? lw.t : 1.0 - lw.t) *
                          (be ? le.t : 1.0 - le.t);
    if (weight == 0.0) continue;
    const std::size_t idx =
        table.flat_index(lv.i0 + static_cast<std::size_t>(bv), la.i0 + static_cast<std::size_t>(ba),
                         lc.i0 + static_cast<std::size_t>(bc), lw.i0 + static_cast<std::size_t>(bw),
                         le.i0 + static_cast<std::size_t>(be));
    out.lift += weight * table.lift[idx];
    out.drag += weight * table.drag[idx];
    out.moment += weight * table.moment[idx];
  }
  return out;
}

AeroForces interpolate_clamped(const AeroTable& table, double v, double alpha, double c, double w,
                               double delta_e) {
  const auto& ax = table.axes;
  return interpolate(table, std::clamp(v, ax.v.front(), ax.v.back()),
                     std::clamp(alpha, ax.alpha.front(), ax.alpha.back()),
                     std::clamp(c, ax.c.front(), ax.c.back()),
                     std::clamp(w, ax.w.front(), ax.w.back()),
                     std::clamp(delta_e, ax.delta_e.front(), ax.delta_e.back()));
}

StabilityDerivatives stability_derivatives(const AeroTable& table, const flight::Design& design,
                                           const flight::TrimPoint& trim, const FdSteps& steps) {
  if (!(steps.dv > 0.0) || !(steps.dalpha > 0.0) || !(steps.dde > 0.0))
    throw ValidationError("finite-difference steps must be positive");
  const auto& ax = table.axes;
  if (trim.v0 - steps.dv < ax.v.front() || trim.v0 + steps.dv > ax.v.back())
    throw OutOfDomain("trim airspeed too close to the V axis edge for the step " +
                      fmt(steps.dv));
  if (trim.alpha0 - steps.dalpha < ax.alpha.front() ||
      trim.alpha0 + steps.dalpha > ax.alpha.back())
    throw OutOfDomain("trim alpha too close to the alpha axis edge for the step " +
                      fmt(steps.dalpha));
  if (trim.de0 - steps.dde < ax.delta_e.front() || trim.de0 + steps.dde > ax.delta_e.back())
    throw OutOfDomain("trim elevator too close to the delta_e axis edge for the step " +
                      fmt(steps.dde));

  const double m = table.params.mass;
  const double jy = table.params.j_y;
  const double f0 = trim.dth0 * table.params.max_thrust;
  const auto x_map = [&](double vq, double aq, double eq) {
    const AeroForces f = interpolate(table, vq, aq, design.c, design.w, eq);
    return (f0 * std::cos(aq) - f.drag) / m;
  };
  const auto z_map = [&](double vq, double aq, double eq) {
    const AeroForces f = interpolate(table, vq, aq, design.c, design.w, eq);
    return -(f0 * std::sin(aq) + f.lift) / m;
  };
  const auto m_map = [&](double vq, double aq, double eq) {
    const AeroForces f = interpolate(table, vq, aq, design.c, design.w, eq);
    return f.moment / jy;  // thrust offset term is constant, drops in differences
  };
  const auto central = [](const auto& f, double lo, double hi, double h) {
    return (f(hi) - f(lo)) / (2.0 * h);
  };

  const double v0 = trim.v0, a0 = trim.alpha0, e0 = trim.de0;
  StabilityDerivatives d;
  d.x_v = central([&](double q) { return x_map(q, a0, e0); }, v0 - steps.dv, v0 + steps.dv, steps.dv);
  d.z_v = central([&](double q) { return z_map(q, a0, e0); }, v0 - steps.dv, v0 + steps.dv, steps.dv);
  d.m_v = central([&](double q) { return m_map(q, a0, e0); }, v0 - steps.dv, v0 + steps.dv, steps.dv);
  d.x_alpha = central([&](double q) { return x_map(v0, q, e0); }, a0 - steps.dalpha,
                      a0 + steps.dalpha, steps.dalpha);
  d.z_alpha = central([&](double q) { return z_map(v0, q, e0); }, a0 - steps.dalpha,
                      a0 + steps.dalpha, steps.dalpha);
  d.m_alpha = central([&](double q) { return m_map(v0, q, e0); }, a0 - steps.dalpha,
                      a0 + steps.dalpha, steps.dalpha);
  d.x_de = central([&](double q) { return x_map(v0, a0, q); }, e0 - steps.dde, e0 + steps.dde,
                   steps.dde);
  d.z_de = central([&](double q) { return z_map(v0, a0, q); }, e0 - steps.dde, e0 + steps.dde,
                   steps.dde);
  d.m_de = central([&](double q) { return m_map(v0, a0, q); }, e0 - steps.dde, e0 + steps.dde,
                   steps.dde);
  d.x_dth = table.params.max_thrust * std::cos(a0) / m;
  d.m_dth = table.params.max_thrust * table.params.thrust_moment_arm / jy;
  return d;
}

}  // namespace rcd::aero
