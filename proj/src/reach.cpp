#include "rcd/reach.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <limits>

#include "rcd/errors.hpp"
#include "rcd/hull.hpp"
#include "rcd/linprog.hpp"
#include "rcd/rng.hpp"
#include "rcd/threading.hpp"

namespace rcd::reach {

InputBox::InputBox(Eigen::VectorXd lower_in, Eigen::VectorXd upper_in)
    : lower(std::move(lower_in)), upper(std::move(upper_in)) {
  if (lower.size() == 0 || lower.size() != upper.size())
    throw ValidationError("InputBox: bounds must be non-empty and of equal size");
  if (!lower.allFinite() || !upper.allFinite())
    throw ValidationError("InputBox: bounds must be finite");
  for (Eigen::Index i = 0; i < lower.size(); ++i)
    if (lower[i] > upper[i]) throw ValidationError("InputBox: lower bound exceeds upper bound");
}

std::string system_fingerprint(const lti::LtiSystem& sys, const InputBox& box) {
  // FNV-1a over the canonical text of every entry
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto absorb = [&h](double v) {
    char buf[40];
    const int len = std::snprintf(buf, sizeof(buf), "%.17g;", v);
    for (int i = 0; i < len; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001B3ULL;
    }
  };
  absorb(static_cast<double>(sys.states()));
  absorb(static_cast<double>(sys.inputs()));
  for (Eigen::Index i = 0; i < sys.a.rows(); ++i)
    for (Eigen::Index j = 0; j < sys.a.cols(); ++j) absorb(sys.a(i, j));
  for (Eigen::Index i = 0; i < sys.b.rows(); ++i)
    for (Eigen::Index j = 0; j < sys.b.cols(); ++j) absorb(sys.b(i, j));
  for (Eigen::Index i = 0; i < box.lower.size(); ++i) absorb(box.lower[i]);
  for (Eigen::Index i = 0; i < box.upper.size(); ++i) absorb(box.upper[i]);
  char out[17];
  std::snprintf(out, sizeof(out), "%016" PRIx64, h);
  return out;
}

ReachPropagator ReachPropagator::build(const lti::LtiSystem& sys, const lti::TimeGrid& grid) {
  ReachPropagator prop;
  prop.grid = grid;
  const double dt = grid.dt();
  auto [a_d, b_d] = lti::discretize(sys, dt);
  prop.a_d = std::move(a_d);
  prop.b_d = std::move(b_d);

  // T - t_mid_k = (n - k - 1/2) dt, so the basis follows the recursion
  // m[n-1] = e^(a dt/2) b, m[k] = e^(a dt) m[k+1].
  const Eigen::MatrixXd e_half = lti::expm(sys.a, dt / 2.0);
  const Eigen::MatrixXd e_full = lti::expm(sys.a, dt);
  prop.switching_basis.resize(static_cast<std::size_t>(grid.n_steps));
  prop.switching_basis.back() = e_half * sys.b;
  for (int k = grid.n_steps - 2; k >= 0; --k)
    prop.switching_basis[static_cast<std::size_t>(k)] =
        e_full * prop.switching_basis[static_cast<std::size_t>(k + 1)];
  return prop;
}

namespace {

void check_direction(const lti::LtiSystem& sys, const Eigen::VectorXd& c) {
  if (c.size() != sys.states()) throw ValidationError("direction dimension mismatch");
  if (!c.allFinite() || c.norm() == 0.0)
    throw ValidationError("direction must be finite and nonzero");
}

void check_box(const lti::LtiSystem& sys, const InputBox& box) {
  if (box.channels() != sys.inputs())
    throw ValidationError("input box channel count does not match the system");
}

std::vector<Eigen::VectorXd> bangbang_from_basis(const ReachPropagator& prop, const InputBox& box,
                                                 const Eigen::VectorXd& c) {
  const auto n = static_cast<std::size_t>(prop.grid.n_steps);
  std::vector<Eigen::VectorXd> control(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Eigen::VectorXd psi = prop.switching_basis[k].transpose() * c;
    Eigen::VectorXd u(box.channels());
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = psi[i] >= 0.0 ? box.upper[i] : box.lower[i];
    control[k] = std::move(u);
  }
  return control;
}

Eigen::VectorXd extreme_from_basis(const ReachPropagator& prop, const InputBox& box,
                                   const Eigen::VectorXd& c) {
  const auto n = static_cast<std::size_t>(prop.grid.n_steps);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(prop.a_d.rows());
  for (std::size_t k = 0; k < n; ++k) {
    const Eigen::VectorXd psi = prop.switching_basis[k].transpose() * c;
    Eigen::VectorXd u(box.channels());
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = psi[i] >= 0.0 ? box.upper[i] : box.lower[i];
    x = prop.a_d * x + prop.b_d * u;
  }
  return x;
}

}  // namespace

std::vector<Eigen::VectorXd> switching_function(const lti::LtiSystem& sys,
                                                const Eigen::VectorXd& c,
                                                const lti::TimeGrid& grid) {
  check_direction(sys, c);
  const auto prop = ReachPropagator::build(sys, grid);
  std::vector<Eigen::VectorXd> psi(static_cast<std::size_t>(grid.n_steps));
  for (std::size_t k = 0; k < psi.size(); ++k)
    psi[k] = prop.switching_basis[k].transpose() * c;
  return psi;
}

std::vector<Eigen::VectorXd> bangbang_control(const lti::LtiSystem& sys, const InputBox& box,
                                              const Eigen::VectorXd& c,
                                              const lti::TimeGrid& grid) {
  check_direction(sys, c);
  check_box(sys, box);
  return bangbang_from_basis(ReachPropagator::build(sys, grid), box, c);
}

Eigen::VectorXd extreme_point(const lti::LtiSystem& sys, const InputBox& box,
                              const Eigen::VectorXd& c, const lti::TimeGrid& grid) {
  check_direction(sys, c);
  check_box(sys, box);
  return extreme_from_basis(ReachPropagator::build(sys, grid), box, c);
}

double support_length(const lti::LtiSystem& sys, const InputBox& box, const Eigen::VectorXd& v,
                      const lti::TimeGrid& grid) {
  check_direction(sys, v);
  check_box(sys, box);
  const auto prop = ReachPropagator::build(sys, grid);
  const double h_plus = v.dot(extreme_from_basis(prop, box, v));
  const double h_minus = (-v).dot(extreme_from_basis(prop, box, -v));
  return h_plus + h_minus;
}

std::vector<Eigen::VectorXd> extreme_points_serial(const ReachPropagator& prop,
                                                   const InputBox& box,
                                                   const std::vector<Eigen::VectorXd>& directions) {
  std::vector<Eigen::VectorXd> vertices(directions.size());
  for (std::size_t i = 0; i < directions.size(); ++i)
    vertices[i] = extreme_from_basis(prop, box, directions[i]);
  return vertices;
}

std::vector<Eigen::VectorXd> extreme_points(const ReachPropagator& prop, const InputBox& box,
                                            const std::vector<Eigen::VectorXd>& directions) {
  const int k = static_cast<int>(directions.size());
  std::vector<Eigen::VectorXd> vertices(directions.size());
#pragma omp parallel for schedule(static) num_threads(rcd::max_threads())
  for (int i = 0; i < k; ++i)
    vertices[static_cast<std::size_t>(i)] =
        extreme_from_basis(prop, box, directions[static_cast<std::size_t>(i)]);
  return vertices;
}

ReachSet sample_reach_set(const lti::LtiSystem& sys, const InputBox& box, int k,
                          const lti::TimeGrid& grid, std::uint64_t seed) {
  if (k < 5) throw ValidationError("sample_reach_set: need at least 5 directions");
  check_box(sys, box);
  ReachSet set;
  set.horizon = grid;
  set.seed = seed;
  set.system_fingerprint = system_fingerprint(sys, box);
  set.directions = rng::unit_directions(static_cast<int>(sys.states()), k, seed);
  const auto prop = ReachPropagator::build(sys, grid);
  set.vertices = extreme_points(prop, box, set.directions);
  return set;
}

double hull_volume(const std::vector<Eigen::VectorXd>& points, bool* degenerate) {
  if (points.size() < 5) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  const auto result = hull::convex_hull_volume(points);
  if (degenerate) *degenerate = result.degenerate;
  return result.volume;
}

bool contains(const ReachSet& set, const Eigen::VectorXd& x, double tol) {
  const auto& verts = set.vertices;
  if (verts.empty()) throw ValidationError("contains: empty vertex set");
  const Eigen::Index d = verts.front().size();
  if (x.size() != d) throw ValidationError("contains: query dimension mismatch");

  Eigen::VectorXd lo = verts.front();
  Eigen::VectorXd hi = verts.front();
  for (const auto& v : verts) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }

  // normalize per axis; collapsed axes are checked directly and dropped
  std::vector<Eigen::Index> active;
  double min_extent = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < d; ++i) {
    const double extent = hi[i] - lo[i];
    if (extent <= 1e-14 * std::max(1.0, std::abs(hi[i]))) {
      if (std::abs(x[i] - lo[i]) > tol + 1e-12) return false;
    } else {
      active.push_back(i);
      min_extent = std::min(min_extent, extent);
    }
  }
  if (active.empty()) return true;

  const auto rows = static_cast<Eigen::Index>(active.size()) + 1;
  const auto cols = static_cast<Eigen::Index>(verts.size());
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd b(rows);
  for (Eigen::Index r = 0; r + 1 < rows; ++r) {
    const Eigen::Index axis = active[static_cast<std::size_t>(r)];
    const double extent = hi[axis] - lo[axis];
    for (Eigen::Index j = 0; j < cols; ++j)
      a(r, j) = (verts[static_cast<std::size_t>(j)][axis] - lo[axis]) / extent;
    b[r] = (x[axis] - lo[axis]) / extent;
  }
  a.row(rows - 1).setOnes();  // convex-combination weights sum to one
  b[rows - 1] = 1.0;

  const double residual = detail::phase1_residual(a, b);
  return residual <= 1e-9 + tol / min_extent;
}

}  // namespace rcd::reach
