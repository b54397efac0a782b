#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "oracles.hpp"
#include "rcd/errors.hpp"
#include "rcd/lti.hpp"
#include "rcd/reach.hpp"
#include "rcd/rng.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using rcd::lti::LtiSystem;
using rcd::lti::TimeGrid;
using rcd::reach::InputBox;

namespace {

MatrixXd random_matrix(int n, int m, std::mt19937& gen, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  MatrixXd r(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) r(i, j) = u(gen);
  return r;
}

MatrixXd random_stable(int n, std::mt19937& gen) {
  MatrixXd a = random_matrix(n, n, gen);
  a -= (a.eigenvalues().real().maxCoeff() + 0.5) * MatrixXd::Identity(n, n);
  return a;
}

LtiSystem double_integrator() {
  MatrixXd a(2, 2), b(2, 1);
  a << 0, 1, 0, 0;
  b << 0, 1;
  return {a, b};
}

InputBox symmetric_box(int m, double r) {
  return {VectorXd::Constant(m, -r), VectorXd::Constant(m, r)};
}

std::vector<VectorXd> random_admissible_controls(const InputBox& box, int steps,
                                                 std::mt19937& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<VectorXd> controls(static_cast<std::size_t>(steps));
  for (auto& c : controls) {
    c = VectorXd(box.channels());
    for (Eigen::Index i = 0; i < c.size(); ++i)
      c[i] = box.lower[i] + u(gen) * (box.upper[i] - box.lower[i]);
  }
  return controls;
}

}  // namespace

TEST_CASE("switching function closed forms") {
  // a = 0, b = [I2; 0]: psi is constant c^T b
  MatrixXd b(4, 2);
  b << 1, 0, 0, 1, 0, 0, 0, 0;
  const LtiSystem sys(MatrixXd::Zero(4, 4), b);
  const TimeGrid grid(0.0, 1.0, 10);
  VectorXd c = VectorXd::Zero(4);
  c[0] = 1.0;
  const auto psi = rcd::reach::switching_function(sys, c, grid);
  REQUIRE(psi.size() == 10);
  for (const auto& p : psi) {
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.0).epsilon(1e-12));
  }

  // double integrator, c = e1: psi(t) = T - t at the step midpoints
  const auto di = double_integrator();
  const TimeGrid g2(0.0, 1.0, 20);
  VectorXd c2(2);
  c2 << 1, 0;
  const auto psi2 = rcd::reach::switching_function(di, c2, g2);
  for (int k = 0; k < 20; ++k) {
    const double t_mid = (k + 0.5) * g2.dt();
    CHECK(psi2[static_cast<std::size_t>(k)][0] ==
          doctest::Approx(1.0 - t_mid).epsilon(1e-12));
  }
}

TEST_CASE("switching function matches a direct expm evaluation") {
  std::mt19937 gen(211);
  const MatrixXd a = random_matrix(4, 4, gen);
  const MatrixXd b = random_matrix(4, 2, gen);
  const LtiSystem sys(a, b);
  const TimeGrid grid(0.0, 2.0, 100);
  VectorXd c(4);
  c << 0.3, -1.2, 0.7, 0.5;
  const auto psi = rcd::reach::switching_function(sys, c, grid);
  for (int k = 0; k < 100; k += 9) {
    const double t_mid = (k + 0.5) * grid.dt();
    const VectorXd ref =
        (c.transpose() * oracles::taylor_expm(a, grid.t_final - t_mid) * b).transpose();
    CHECK((psi[static_cast<std::size_t>(k)] - ref).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("bang-bang control selects the right corners") {
  // scalar integrator, c = 1: u = upper everywhere; ties at psi = 0 go up
  const LtiSystem scalar(MatrixXd::Zero(1, 1), MatrixXd::Ones(1, 1));
  const TimeGrid grid(0.0, 1.0, 8);
  const InputBox box((VectorXd(1) << 0.0).finished(), (VectorXd(1) << 1.0).finished());
  const auto up = rcd::reach::bangbang_control(scalar, box, (VectorXd(1) << 1.0).finished(), grid);
  for (const auto& u : up) CHECK(u[0] == 1.0);
  const auto down =
      rcd::reach::bangbang_control(scalar, box, (VectorXd(1) << -1.0).finished(), grid);
  for (const auto& u : down) CHECK(u[0] == 0.0);

  // double integrator, c = [0, -1]: psi = -1 everywhere, so u = lower
  const auto di = double_integrator();
  const InputBox sym = symmetric_box(1, 1.0);
  const auto bb =
      rcd::reach::bangbang_control(di, sym, (VectorXd(2) << 0.0, -1.0).finished(), grid);
  for (const auto& u : bb) CHECK(u[0] == -1.0);
}

TEST_CASE("extreme points of textbook systems") {
  // scalar integrator with u in [0, 1]: farthest point after T = 1 is 1
  const LtiSystem scalar(MatrixXd::Zero(1, 1), MatrixXd::Ones(1, 1));
  const TimeGrid grid(0.0, 1.0, 200);
  const InputBox box01((VectorXd(1) << 0.0).finished(), (VectorXd(1) << 1.0).finished());
  const VectorXd x =
      rcd::reach::extreme_point(scalar, box01, (VectorXd(1) << 1.0).finished(), grid);
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-9));

  // double integrator with u in [-1, 1]: max position state is (0.5, 1)
  const auto di = double_integrator();
  const VectorXd xe = rcd::reach::extreme_point(di, symmetric_box(1, 1.0),
                                                (VectorXd(2) << 1.0, 0.0).finished(), grid);
  CHECK(xe[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(xe[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("extreme point dominates random admissible controls") {
  std::mt19937 gen(223);
  const MatrixXd a = random_stable(4, gen);
  const MatrixXd b = random_matrix(4, 2, gen);
  const LtiSystem sys(a, b);
  const TimeGrid grid(0.0, 1.5, 150);
  const InputBox box((VectorXd(2) << -0.4, -1.0).finished(),
                     (VectorXd(2) << 0.6, 0.3).finished());
  VectorXd c(4);
  c << 1.0, -0.5, 0.25, 0.8;
  c.normalize();
  const double support = c.dot(rcd::reach::extreme_point(sys, box, c, grid));
  for (int trial = 0; trial < 1000; ++trial) {
    const auto u = random_admissible_controls(box, 150, gen);
    const auto traj = rcd::lti::propagate_pwc(sys, VectorXd::Zero(4), u, grid);
    CHECK(c.dot(traj.states.back()) <= support + 1e-9);
  }
}

TEST_CASE("support lengths of textbook systems") {
  const LtiSystem scalar(MatrixXd::Zero(1, 1), MatrixXd::Ones(1, 1));
  const TimeGrid grid(0.0, 1.0, 200);

  // u in [0, 1]: projection interval is [0, 1]
  const InputBox box01((VectorXd(1) << 0.0).finished(), (VectorXd(1) << 1.0).finished());
  CHECK(rcd::reach::support_length(scalar, box01, (VectorXd(1) << 1.0).finished(), grid) ==
        doctest::Approx(1.0).epsilon(1e-9));

  // u in [-1, 1]: projection interval is [-1, 1], length 2
  CHECK(rcd::reach::support_length(scalar, symmetric_box(1, 1.0),
                                   (VectorXd(1) << 1.0).finished(), grid) ==
        doctest::Approx(2.0).epsilon(1e-9));

  // direction scaling: support_length is 1-homogeneous in v
  const auto di = double_integrator();
  VectorXd v(2);
  v << 0.6, -0.8;
  const double s1 = rcd::reach::support_length(di, symmetric_box(1, 1.0), v, grid);
  const double s2 = rcd::reach::support_length(di, symmetric_box(1, 1.0), 2.0 * v, grid);
  CHECK(s2 == doctest::Approx(2.0 * s1).epsilon(1e-12));
}

TEST_CASE("asymmetric box equals shifted symmetric box plus particular drift") {
  std::mt19937 gen(227);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXd a = random_stable(4, gen);
    const MatrixXd b = random_matrix(4, 2, gen);
    const LtiSystem sys(a, b);
    const TimeGrid grid(0.0, 1.0, 60);
    VectorXd lower(2), upper(2);
    lower << -0.2, -1.5;
    upper << 1.0, 0.1;
    const InputBox box(lower, upper);
    const VectorXd center = 0.5 * (lower + upper);
    const VectorXd radius = 0.5 * (upper - lower);
    const InputBox centered(-radius, radius);

    VectorXd c = random_matrix(4, 1, gen).col(0);
    c.normalize();
    const VectorXd full = rcd::reach::extreme_point(sys, box, c, grid);
    const VectorXd sym = rcd::reach::extreme_point(sys, centered, c, grid);
    // drift of the constant center input through the same discretization
    const std::vector<VectorXd> hold(60, center);
    const VectorXd drift =
        rcd::lti::propagate_pwc(sys, VectorXd::Zero(4), hold, grid).states.back();
    CHECK((full - (sym + drift)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("sampled reach set is deterministic and prefix-nested") {
  std::mt19937 gen(229);
  const MatrixXd a = random_stable(4, gen);
  const MatrixXd b = random_matrix(4, 2, gen);
  const LtiSystem sys(a, b);
  const TimeGrid grid(0.0, 1.0, 80);
  const InputBox box = symmetric_box(2, 1.0);

  const auto s1 = rcd::reach::sample_reach_set(sys, box, 64, grid, 99);
  const auto s2 = rcd::reach::sample_reach_set(sys, box, 64, grid, 99);
  REQUIRE(s1.vertices.size() == 64);
  for (std::size_t i = 0; i < s1.vertices.size(); ++i) {
    CHECK((s1.vertices[i] - s2.vertices[i]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((s1.directions[i] - s2.directions[i]).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(s1.system_fingerprint == s2.system_fingerprint);

  // a 512-direction sample extends the 64-direction one, so volume cannot drop
  const auto s3 = rcd::reach::sample_reach_set(sys, box, 512, grid, 99);
  for (std::size_t i = 0; i < 64; ++i)
    CHECK((s3.directions[i] - s1.directions[i]).cwiseAbs().maxCoeff() == 0.0);
  const double v64 = rcd::reach::hull_volume(s1.vertices);
  const double v512 = rcd::reach::hull_volume(s3.vertices);
  CHECK(v512 >= v64 - 1e-12);

  // directions are unit vectors
  for (const auto& d : s3.directions) CHECK(std::abs(d.norm() - 1.0) < 1e-12);

  // each vertex maximizes its own direction over the stored vertex cloud
  for (std::size_t i = 0; i < s1.vertices.size(); ++i) {
    const double own = s1.directions[i].dot(s1.vertices[i]);
    for (const auto& other : s1.vertices) CHECK(s1.directions[i].dot(other) <= own + 1e-9);
  }
}

TEST_CASE("parallel and serial extreme-point kernels agree bitwise") {
  std::mt19937 gen(233);
  const MatrixXd a = random_stable(4, gen);
  const MatrixXd b = random_matrix(4, 2, gen);
  const LtiSystem sys(a, b);
  const TimeGrid grid(0.0, 2.0, 100);
  const InputBox box((VectorXd(2) << -0.3, -0.8).finished(),
                     (VectorXd(2) << 0.7, 0.2).finished());
  const auto dirs = rcd::rng::unit_directions(4, 128, 7);
  const auto prop = rcd::reach::ReachPropagator::build(sys, grid);
  const auto par = rcd::reach::extreme_points(prop, box, dirs);
  const auto ser = rcd::reach::extreme_points_serial(prop, box, dirs);
  REQUIRE(par.size() == ser.size());
  for (std::size_t i = 0; i < par.size(); ++i)
    CHECK((par[i] - ser[i]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cube reachable set: independent channels under a = 0") {
  // a = 0, b = I4, u in [-1, 1]^4, T = 1: reachable set is the cube [-1, 1]^4
  const LtiSystem sys(MatrixXd::Zero(4, 4), MatrixXd::Identity(4, 4));
  const TimeGrid grid(0.0, 1.0, 50);
  const auto set = rcd::reach::sample_reach_set(sys, symmetric_box(4, 1.0), 256, grid, 3);
  const double volume = rcd::reach::hull_volume(set.vertices);
  CHECK(volume == doctest::Approx(16.0).epsilon(1e-6));
  for (const auto& v : set.vertices) CHECK(v.cwiseAbs().maxCoeff() <= 1.0 + 1e-9);
}

TEST_CASE("volume grows with the horizon when coasting is admissible") {
  std::mt19937 gen(239);
  const MatrixXd a = random_stable(4, gen);
  const MatrixXd b = random_matrix(4, 2, gen);
  const LtiSystem sys(a, b);
  const InputBox box = symmetric_box(2, 1.0);  // contains u = 0
  const auto dirs = rcd::rng::unit_directions(4, 128, 11);

  double prev = 0.0;
  for (double t_final : {0.5, 1.0, 2.0}) {
    const TimeGrid grid(0.0, t_final, 100);
    const auto prop = rcd::reach::ReachPropagator::build(sys, grid);
    const double vol = rcd::reach::hull_volume(rcd::reach::extreme_points(prop, box, dirs));
    CHECK(vol >= prev - 1e-9);
    prev = vol;
  }
}

TEST_CASE("sampled hull midpoints stay inside the set") {
  std::mt19937 gen(241);
  const MatrixXd a = random_stable(4, gen);
  const MatrixXd b = random_matrix(4, 2, gen);
  const LtiSystem sys(a, b);
  const TimeGrid grid(0.0, 1.0, 60);
  const auto set = rcd::reach::sample_reach_set(sys, symmetric_box(2, 1.0), 64, grid, 5);

  VectorXd centroid = VectorXd::Zero(4);
  for (const auto& v : set.vertices) centroid += v;
  centroid /= static_cast<double>(set.vertices.size());
  CHECK(rcd::reach::contains(set, centroid, 1e-6));

  std::uniform_int_distribution<std::size_t> pick(0, set.vertices.size() - 1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto& v1 = set.vertices[pick(gen)];
    const auto& v2 = set.vertices[pick(gen)];
    CHECK(rcd::reach::contains(set, 0.5 * (v1 + v2), 1e-6));
  }
  // far exterior point
  const VectorXd outside = set.vertices[0] + 10.0 * (set.vertices[0] - centroid);
  CHECK(!rcd::reach::contains(set, outside, 1e-6));
}

TEST_CASE("central symmetry for centered boxes") {
  std::mt19937 gen(251);
  const MatrixXd a = random_stable(4, gen);
  const MatrixXd b = random_matrix(4, 2, gen);
  const LtiSystem sys(a, b);
  const TimeGrid grid(0.0, 1.0, 60);
  const InputBox box = symmetric_box(2, 0.7);
  VectorXd c = random_matrix(4, 1, gen).col(0);
  c.normalize();
  const VectorXd plus = rcd::reach::extreme_point(sys, box, c, grid);
  const VectorXd minus = rcd::reach::extreme_point(sys, box, -c, grid);
  CHECK((plus + minus).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("validation errors") {
  const auto di = double_integrator();
  const TimeGrid grid(0.0, 1.0, 10);
  CHECK_THROWS_AS(rcd::reach::sample_reach_set(di, symmetric_box(1, 1.0), 4, grid, 0),
                  rcd::ValidationError);
  CHECK_THROWS_AS(rcd::reach::extreme_point(di, symmetric_box(2, 1.0),
                                            (VectorXd(2) << 1.0, 0.0).finished(), grid),
                  rcd::ValidationError);  // box channel mismatch
  CHECK_THROWS_AS(
      rcd::reach::extreme_point(di, symmetric_box(1, 1.0), VectorXd::Zero(2), grid),
      rcd::ValidationError);  // zero direction
  CHECK_THROWS_AS(InputBox((VectorXd(1) << 1.0).finished(), (VectorXd(1) << -1.0).finished()),
                  rcd::ValidationError);
}
