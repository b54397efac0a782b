// Times the OpenMP kernels against their serial references and checks that
// both produce identical results. Run after changing the parallel paths.
#include <chrono>
#include <cstdio>
#include <vector>

#include "rcd/aero.hpp"
#include "rcd/flight.hpp"
#include "rcd/reach.hpp"
#include "rcd/rng.hpp"
#include "rcd/threading.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double max_abs_diff(const std::vector<Eigen::VectorXd>& a,
                    const std::vector<Eigen::VectorXd>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, (a[i] - b[i]).cwiseAbs().maxCoeff());
  return worst;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace

int main() {
  std::printf("threads available: %d\n\n", rcd::max_threads());

  // reachable-set extremals on the cruise model
  const auto axes = rcd::aero::AeroAxes::uniform(6);
  const auto table = rcd::aero::generate_table(axes, {}, {});
  const rcd::flight::Design design(5.0, 12.0);
  const auto trim = rcd::flight::trim(design, table, table.params, 200.0, 0.0);
  const auto model = rcd::flight::linearize(design, table, table.params, trim);
  const rcd::lti::TimeGrid grid(0.0, 2.0, 200);
  const auto prop = rcd::reach::ReachPropagator::build(model.system, grid);
  const auto dirs = rcd::rng::unit_directions(4, 2048, 0);

  auto start = Clock::now();
  const auto parallel = rcd::reach::extreme_points(prop, model.input_box, dirs);
  const double t_par = ms_since(start);

  start = Clock::now();
  const auto serial = rcd::reach::extreme_points_serial(prop, model.input_box, dirs);
  const double t_ser = ms_since(start);

  std::printf("extreme_points, 2048 directions x 200 steps\n");
  std::printf("  parallel %8.2f ms\n", t_par);
  std::printf("  serial   %8.2f ms  (%.2fx)\n", t_ser, t_ser / t_par);
  std::printf("  max |delta| %g\n\n", max_abs_diff(parallel, serial));

  // aerodynamic table synthesis on a denser grid than the default
  const auto bench_axes = rcd::aero::AeroAxes::uniform(12);
  start = Clock::now();
  const auto table_par = rcd::aero::generate_table(bench_axes, {}, {});
  const double g_par = ms_since(start);

  start = Clock::now();
  const auto table_ser = rcd::aero::generate_table_serial(bench_axes, {}, {});
  const double g_ser = ms_since(start);

  const double worst = std::max({max_abs_diff(table_par.lift, table_ser.lift),
                                 max_abs_diff(table_par.drag, table_ser.drag),
                                 max_abs_diff(table_par.moment, table_ser.moment)});
  std::printf("generate_table, %zu entries\n", table_par.lift.size());
  std::printf("  parallel %8.2f ms\n", g_par);
  std::printf("  serial   %8.2f ms  (%.2fx)\n", g_ser, g_ser / g_par);
  std::printf("  max |delta| %g\n", worst);

  return worst == 0.0 && max_abs_diff(parallel, serial) == 0.0 ? 0 : 1;
}
