#include "rcd/optim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <utility>

#include "rcd/errors.hpp"
#include "rcd/reach.hpp"
#include "rcd/rng.hpp"

namespace rcd::optim {
namespace {

using Eigen::Matrix2d;
using Eigen::Vector2d;

constexpr double kFdStep = 0.05;
constexpr double kStepTol = 1e-3;
constexpr double kRelObjTol = 1e-6;
constexpr int kMaxIterations = 100;
constexpr int kMaxBacktracks = 20;
constexpr double kArmijo = 1e-4;

Vector2d lower_bounds() { return {flight::Design::kCenterMin, flight::Design::kWingMin}; }
Vector2d upper_bounds() { return {flight::Design::kCenterMax, flight::Design::kWingMax}; }

flight::Design to_design(const Vector2d& d) { return {d[0], d[1]}; }

// Memoized evaluator keyed on the exact coordinates, so the line search and
// the next stencil never pay twice for one design.
struct CachedFn {
  const std::function<double(const flight::Design&)>* fn = nullptr;
  std::map<std::pair<double, double>, double> memo;

  double operator()(const Vector2d& d) {
    const auto key = std::make_pair(d[0], d[1]);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const double val = (*fn)(to_design(d));
    if (!std::isfinite(val))
      throw NumericalError("optimize: evaluation returned a non-finite value");
    memo.emplace(key, val);
    return val;
  }
};

Vector2d cache_gradient(CachedFn& fn, const Vector2d& x) {
  auto wrap = [&fn](const flight::Design& d) { return fn(Vector2d(d.c, d.w)); };
  return fd_gradient(wrap, to_design(x), kFdStep);
}

// min 1/2 p'h p + grad'p over lo <= p <= hi, optionally with a'p >= rhs.
// Two variables allow exhaustive active-set enumeration: every combination of
// pinned coordinates and constraint activity is solved exactly and the
// feasible candidate with the lowest objective wins.
struct QpSolution {
  Vector2d p = Vector2d::Zero();
  double lambda = 0.0;
  double objective = std::numeric_limits<double>::infinity();
  bool found = false;
};

QpSolution solve_qp(const Matrix2d& h, const Vector2d& grad, const Vector2d& lo,
                    const Vector2d& hi, bool with_lin, const Vector2d& a, double rhs) {
  QpSolution best;
  const double scale = 1.0 + grad.cwiseAbs().maxCoeff() + h.cwiseAbs().maxCoeff();
  const double tol = 1e-9 * scale;
  for (int s0 = 0; s0 < 3; ++s0) {      // 0 free, 1 at lower, 2 at upper
    for (int s1 = 0; s1 < 3; ++s1) {
      for (int la = 0; la < (with_lin ? 2 : 1); ++la) {
        const std::array<int, 2> state{s0, s1};
        const int pinned = (s0 != 0) + (s1 != 0);
        if (pinned + la > 2) continue;

        Vector2d p = Vector2d::Zero();
        double lambda = 0.0;
        bool ok = true;
        for (int i = 0; i < 2; ++i)
          if (state[i] != 0) p[i] = (state[i] == 1) ? lo[i] : hi[i];

        if (la == 0) {
          if (pinned == 0) {
            const double det = h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0);
            if (std::abs(det) < 1e-14 * scale * scale) {
              ok = false;
            } else {
              p[0] = (-grad[0] * h(1, 1) + grad[1] * h(0, 1)) / det;
              p[1] = (-grad[1] * h(0, 0) + grad[0] * h(1, 0)) / det;
            }
          } else if (pinned == 1) {
            const int i = (s0 != 0) ? 0 : 1, j = 1 - i;
            if (std::abs(h(j, j)) < 1e-14 * scale) {
              ok = false;
            } else {
              p[j] = -(grad[j] + h(j, i) * p[i]) / h(j, j);
            }
          }
        } else if (pinned == 1) {
          const int i = (s0 != 0) ? 0 : 1, j = 1 - i;
          if (std::abs(a[j]) < 1e-12) {
            ok = false;
          } else {
            p[j] = (rhs - a[i] * p[i]) / a[j];
            lambda = (h.row(j).dot(p) + grad[j]) / a[j];
          }
        } else {
          Eigen::Matrix3d kkt;
          kkt << h(0, 0), h(0, 1), -a[0], h(1, 0), h(1, 1), -a[1], a[0], a[1], 0.0;
          Eigen::FullPivLU<Eigen::Matrix3d> lu(kkt);
          if (!lu.isInvertible()) {
            ok = false;
          } else {
            const Eigen::Vector3d sol = lu.solve(Eigen::Vector3d(-grad[0], -grad[1], rhs));
            p = sol.head<2>();
            lambda = sol[2];
          }
        }
        if (!ok || !p.allFinite()) continue;

        for (int i = 0; i < 2; ++i)
          if (state[i] == 0 && (p[i] < lo[i] - tol || p[i] > hi[i] + tol)) ok = false;
        if (with_lin && la == 0 && a.dot(p) < rhs - tol) ok = false;
        if (la == 1 && lambda < -tol) ok = false;
        const Vector2d stat = h * p + grad - (la ? lambda : 0.0) * a;
        for (int i = 0; i < 2; ++i) {
          if (state[i] == 1 && stat[i] < -tol) ok = false;   // multiplier of p_i >= lo_i
          if (state[i] == 2 && -stat[i] < -tol) ok = false;  // multiplier of p_i <= hi_i
        }
        if (!ok) continue;

        p = p.cwiseMax(lo).cwiseMin(hi);
        const double val = 0.5 * p.dot(h * p) + grad.dot(p);
        if (val < best.objective) best = {p, la ? lambda : 0.0, val, true};
      }
    }
  }
  return best;
}

// Powell-damped BFGS update of the (minimization) curvature model.
void bfgs_update(Matrix2d& h, const Vector2d& s, const Vector2d& y) {
  const double shs = s.dot(h * s);
  if (!(shs > 0.0)) return;
  double sy = s.dot(y);
  Vector2d yd = y;
  if (sy < 0.2 * shs) {
    const double theta = 0.8 * shs / (shs - sy);
    yd = theta * y + (1.0 - theta) * (h * s);
    sy = s.dot(yd);
  }
  if (!(sy > 1e-14 * s.squaredNorm())) return;
  const Vector2d hs = h * s;
  h += yd * yd.transpose() / sy - hs * hs.transpose() / shs;
}

struct LoopResult {
  Vector2d x;
  OptStatus status = OptStatus::kMaxIter;
  int accepted = 0;
};

// One SQP descent on the negated objective; gcon == nullptr drops the
// constraint machinery. record sees every accepted iterate; stop_early can
// end the loop once an iterate satisfies an external goal (restoration).
LoopResult sqp_loop(CachedFn& fobj, CachedFn* gcon, Vector2d x, int budget,
                    const std::function<bool(const Vector2d&)>& stop_early,
                    const std::function<void(const Vector2d&)>& record) {
  const Vector2d lb = lower_bounds(), ub = upper_bounds();
  auto viol = [](double g) { return std::max(0.0, -g); };

  bool scaled = false;
  double mu = 1.0;
  double f_cur = fobj(x);
  double g_cur = gcon ? (*gcon)(x) : 0.0;
  Vector2d grad_f = cache_gradient(fobj, x);
  Vector2d grad_g = gcon ? cache_gradient(*gcon, x) : Vector2d::Zero();

  // Size the initial curvature so the first trial step spans half a unit
  // regardless of the objective's scale; the first secant update replaces it.
  const double grad_scale = grad_f.cwiseAbs().maxCoeff();
  Matrix2d hmat = (grad_scale > 1e-12 ? grad_scale / 0.5 : 1.0) * Matrix2d::Identity();

  LoopResult out{x, OptStatus::kMaxIter, 0};
  for (int iter = 0; iter < budget; ++iter) {
    const Vector2d lo = lb - x, hi = ub - x;
    QpSolution qp = solve_qp(hmat, -grad_f, lo, hi, gcon != nullptr, grad_g, -g_cur);
    Vector2d p = qp.p;
    if (!qp.found) {
      if (!gcon) throw SolverError("optimize: quadratic subproblem had no solution");
      // Linearized constraint and box are jointly infeasible here: step as
      // far toward feasibility as the box allows.
      for (int i = 0; i < 2; ++i) p[i] = grad_g[i] > 0.0 ? hi[i] : (grad_g[i] < 0.0 ? lo[i] : 0.0);
      qp.lambda = 0.0;
    }
    if (gcon) mu = std::max(mu, 2.0 * std::abs(qp.lambda) + 1e-3);

    const double viol_lin = gcon ? viol(g_cur + grad_g.dot(p)) : 0.0;
    const double pred = grad_f.dot(p) - 0.5 * p.dot(hmat * p) + mu * (viol(g_cur) - viol_lin);
    const double phi0 = -f_cur + mu * viol(g_cur);

    double alpha = 1.0;
    bool accepted = false;
    Vector2d xn = x;
    double f_new = f_cur, g_new = g_cur;
    auto try_candidate = [&](const Vector2d& cand, double required) {
      try {
        const double fc = fobj(cand);
        const double gc = gcon ? (*gcon)(cand) : 0.0;
        if (-fc + mu * viol(gc) <= phi0 - required) {
          xn = cand;
          f_new = fc;
          g_new = gc;
          accepted = true;
        }
      } catch (const NumericalError&) {
        // evaluation failed out there; retreat and try closer to x
      }
      return accepted;
    };
    for (int bt = 0; bt <= kMaxBacktracks && !accepted; ++bt) {
      const Vector2d cand = (x + alpha * p).cwiseMax(lb).cwiseMin(ub);
      const double required = kArmijo * alpha * std::max(pred, 0.0);
      if (!try_candidate(cand, required) && bt == 0 && gcon) {
        // A full step along a curved constraint lands with an O(|p|^2)
        // violation the merit rejects even though the direction is right.
        // Retry with that violation projected out so progress does not
        // collapse into boundary-hugging slivers.
        try {
          const double g_trial = (*gcon)(cand);
          const double n2 = grad_g.squaredNorm();
          if (g_trial < 0.0 && n2 > 1e-18)
            try_candidate((cand - (g_trial / n2) * grad_g).cwiseMax(lb).cwiseMin(ub), required);
        } catch (const NumericalError&) {
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // A full backtrack below the step tolerance means the model cannot
      // improve at finite-difference resolution: that is convergence, not
      // failure. Anything larger is a genuine merit mismatch.
      out.status = p.cwiseAbs().maxCoeff() < kStepTol ? OptStatus::kConverged
                                                      : OptStatus::kLineSearchFailure;
      return out;
    }

    const Vector2d step = xn - x;
    ++out.accepted;
    if (step.norm() > 0.0) record(xn);

    const Vector2d grad_f_new = cache_gradient(fobj, xn);
    const Vector2d grad_g_new = gcon ? cache_gradient(*gcon, xn) : Vector2d::Zero();
    // Secant pair of the minimization Lagrangian -f - lambda g at frozen
    // lambda; the multiplier term is what lets the model learn the
    // constraint's curvature when the objective alone is flat along it.
    const Vector2d y =
        (-grad_f_new - qp.lambda * grad_g_new) - (-grad_f - qp.lambda * grad_g);
    if (step.norm() > 0.0) {
      if (!scaled && y.dot(step) > 0.0) {
        hmat = (y.dot(y) / y.dot(step)) * Matrix2d::Identity();
        scaled = true;
      }
      bfgs_update(hmat, step, y);
    }

    const double df = std::abs(f_new - f_cur);
    const bool small_step = step.cwiseAbs().maxCoeff() < kStepTol;
    const bool small_change = df / std::max(std::abs(f_new), 1e-12) < kRelObjTol;
    // The l1 penalty must outgrow the true multiplier or the merit tolerates
    // a persistent sliver of infeasibility; escalate while violations last.
    if (gcon && g_new < -1e-9) mu = std::min(mu * 4.0, 1e8);
    x = xn;
    f_cur = f_new;
    g_cur = g_new;
    grad_f = grad_f_new;
    grad_g = grad_g_new;
    out.x = x;
    if (stop_early && stop_early(x)) {
      out.status = OptStatus::kConverged;
      return out;
    }
    if (small_step || small_change) {
      out.status = OptStatus::kConverged;
      return out;
    }
  }
  out.x = x;
  return out;
}

// Step-halving extrapolation knocks out the O(h^2) stencil error; used for
// the reported residual so the verdict is sharper than the stepping gradient.
Vector2d refined_gradient(CachedFn& fn, const Vector2d& x) {
  auto wrap = [&fn](const flight::Design& d) { return fn(Vector2d(d.c, d.w)); };
  const Vector2d coarse = fd_gradient(wrap, to_design(x), kFdStep);
  const Vector2d fine = fd_gradient(wrap, to_design(x), kFdStep / 2.0);
  return (4.0 * fine - coarse) / 3.0;
}

// Stationarity residual with least-squares multipliers over the active set,
// nonnegativity enforced by dropping columns whose multiplier comes out
// negative. Scaled by max(1, |grad f|) so tight and loose objectives are
// comparable.
double kkt_residual(CachedFn& fobj, CachedFn* gcon, const Vector2d& x, double g_val) {
  const Vector2d grad_f = refined_gradient(fobj, x);
  const Vector2d lb = lower_bounds(), ub = upper_bounds();

  std::vector<Vector2d> cols;
  if (gcon && g_val <= 1e-3) cols.push_back(refined_gradient(*gcon, x));
  for (int i = 0; i < 2; ++i) {
    if (x[i] - lb[i] < 1e-6) cols.push_back(Vector2d::Unit(i));
    if (ub[i] - x[i] < 1e-6) cols.push_back(-Vector2d::Unit(i));
  }

  std::vector<bool> live(cols.size(), true);
  Vector2d resid = grad_f;
  for (int round = 0; round <= int(cols.size()); ++round) {
    std::vector<int> idx;
    for (size_t j = 0; j < cols.size(); ++j)
      if (live[j]) idx.push_back(int(j));
    if (idx.empty()) {
      resid = grad_f;
      break;
    }
    Eigen::MatrixXd amat(2, idx.size());
    for (size_t j = 0; j < idx.size(); ++j) amat.col(j) = cols[size_t(idx[j])];
    // stationarity grad_f + amat * mult = 0, mult >= 0
    Eigen::VectorXd mult = amat.colPivHouseholderQr().solve(-grad_f);
    int worst = -1;
    double most_neg = -1e-12;
    for (int j = 0; j < mult.size(); ++j)
      if (mult[j] < most_neg) {
        most_neg = mult[j];
        worst = j;
      }
    if (worst < 0) {
      resid = grad_f + amat * mult;
      break;
    }
    live[size_t(idx[worst])] = false;
  }
  return resid.norm() / std::max(1.0, grad_f.norm());
}

}  // namespace

const char* to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kVm: return "vm";
    case ProblemKind::kDm: return "dm";
    case ProblemKind::kVmdc: return "vmdc";
  }
  return "vm";
}

const char* to_string(OptStatus status) {
  switch (status) {
    case OptStatus::kConverged: return "converged";
    case OptStatus::kMaxIter: return "max_iter";
    case OptStatus::kLineSearchFailure: return "line_search_failure";
  }
  return "max_iter";
}

Eigen::Vector4d default_direction() {
  const double angle = 110.0 * std::numbers::pi / 180.0;
  return {0.0, 0.0, std::cos(angle), std::sin(angle)};
}

MetricContext::MetricContext(const aero::AeroTable& table_in, const aero::AircraftParams& params_in,
                             const ReachRecipe& recipe_in)
    : table(&table_in), params(params_in), recipe(recipe_in) {
  if (!(recipe.airspeed > 0.0) || !std::isfinite(recipe.airspeed))
    throw ValidationError("metric recipe: airspeed must be positive");
  if (!std::isfinite(recipe.gamma)) throw ValidationError("metric recipe: gamma must be finite");
  if (!(recipe.horizon > 0.0) || !std::isfinite(recipe.horizon))
    throw ValidationError("metric recipe: horizon must be positive");
  if (recipe.n_steps < 1) throw ValidationError("metric recipe: n_steps must be at least 1");
  if (recipe.directions < 1) throw ValidationError("metric recipe: needs at least one direction");
  directions = rng::unit_directions(4, recipe.directions, recipe.seed);
}

double objective_vm(const flight::Design& d, const MetricContext& ctx) {
  const auto tp = flight::trim(d, *ctx.table, ctx.params, ctx.recipe.airspeed, ctx.recipe.gamma);
  const auto lm = flight::linearize(d, *ctx.table, ctx.params, tp);
  const auto prop = reach::ReachPropagator::build(lm.system, ctx.grid());
  const auto points = reach::extreme_points(prop, lm.input_box, ctx.directions);
  return reach::hull_volume(points);
}

double objective_dm(const flight::Design& d, const Eigen::Vector4d& v, const MetricContext& ctx) {
  const auto tp = flight::trim(d, *ctx.table, ctx.params, ctx.recipe.airspeed, ctx.recipe.gamma);
  const auto lm = flight::linearize(d, *ctx.table, ctx.params, tp);
  return reach::support_length(lm.system, lm.input_box, v, ctx.grid());
}

double constraint_vmdc(const flight::Design& d, const Eigen::Vector4d& v, double kappa,
                       double baseline, const MetricContext& ctx) {
  if (!(kappa >= 0.0) || !(kappa <= 1.0))
    throw ValidationError("vmdc: kappa must lie in [0, 1]");
  if (!std::isfinite(baseline)) throw ValidationError("vmdc: baseline must be finite");
  return objective_dm(d, v, ctx) - (1.0 + kappa) * baseline;
}

Eigen::Vector2d fd_gradient(const std::function<double(const flight::Design&)>& f,
                            const flight::Design& d, double h) {
  if (!f) throw ValidationError("fd_gradient needs an objective");
  if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("fd_gradient needs h > 0");
  const Vector2d lo = lower_bounds(), hi = upper_bounds();
  const Vector2d x(d.c, d.w);
  auto eval = [&](const Vector2d& at) {
    try {
      return f(to_design(at));
    } catch (const TrimFailure& failure) {
      std::ostringstream msg;
      msg << failure.what() << " while evaluating design (" << at[0] << ", " << at[1] << ")";
      throw TrimFailure(msg.str(), failure.residual_norm);
    }
  };
  Vector2d grad;
  for (int i = 0; i < 2; ++i) {
    Vector2d up = x, dn = x;
    up[i] = std::min(x[i] + h, hi[i]);
    dn[i] = std::max(x[i] - h, lo[i]);
    if (!(up[i] > dn[i])) throw ValidationError("fd_gradient: step does not fit in the box");
    grad[i] = (eval(up) - eval(dn)) / (up[i] - dn[i]);
  }
  return grad;
}

OptProblem::OptProblem(ProblemKind kind_in, const flight::Design& d0_in,
                       const ReachRecipe& recipe_in, const Eigen::Vector4d& v_in, double kappa_in)
    : kind(kind_in), d0(d0_in), recipe(recipe_in), v(v_in), kappa(kappa_in) {
  if (!v.allFinite() || v.norm() < 1e-9)
    throw ValidationError("optimize: direction must be a nonzero finite 4-vector");
  v.normalize();
  if (!(kappa >= 0.0) || !(kappa <= 1.0))
    throw ValidationError("optimize: kappa must lie in [0, 1]");
}

Evaluators make_evaluators(const OptProblem& problem, const MetricContext& ctx) {
  Evaluators out;
  const MetricContext* c = &ctx;
  switch (problem.kind) {
    case ProblemKind::kVm:
      out.objective = [c](const flight::Design& d) { return objective_vm(d, *c); };
      break;
    case ProblemKind::kDm: {
      const Eigen::Vector4d v = problem.v;
      out.objective = [c, v](const flight::Design& d) { return objective_dm(d, v, *c); };
      break;
    }
    case ProblemKind::kVmdc: {
      const Eigen::Vector4d v = problem.v;
      const double kappa = problem.kappa;
      const double baseline = objective_dm(problem.d0, v, ctx);
      out.objective = [c](const flight::Design& d) { return objective_vm(d, *c); };
      out.constraint = [c, v, kappa, baseline](const flight::Design& d) {
        return constraint_vmdc(d, v, kappa, baseline, *c);
      };
      break;
    }
  }
  return out;
}

OptResult solve(const OptProblem& problem, const Evaluators& eval) {
  if (!eval.objective) throw ValidationError("optimize: missing objective evaluator");
  const bool constrained = problem.kind == ProblemKind::kVmdc;
  if (constrained && !eval.constraint)
    throw ValidationError("optimize: the constrained problem needs a constraint evaluator");

  CachedFn fobj{&eval.objective, {}};
  CachedFn gcon{&eval.constraint, {}};
  CachedFn* gptr = constrained ? &gcon : nullptr;

  OptResult res;
  Vector2d x(problem.d0.c, problem.d0.w);
  auto record = [&](const Vector2d& d) {
    res.designs.push_back(d);
    res.objective_history.push_back(fobj(d));
    if (constrained) res.constraint_values.push_back(gcon(d));
  };
  record(x);

  int used = 0;
  if (constrained && gcon(x) < 0.0) {
    // The floor demands an improvement over the start, so the start is
    // infeasible: climb the feasibility margin first.
    auto feasible = [&](const Vector2d& at) { return gcon(at) >= 0.0; };
    LoopResult rest = sqp_loop(gcon, nullptr, x, kMaxIterations, feasible, record);
    x = rest.x;
    used = rest.accepted;
    if (gcon(x) < 0.0) {
      res.d_star = to_design(x);
      res.iterations = used;
      res.status = OptStatus::kLineSearchFailure;
      res.kkt_residual = kkt_residual(fobj, gptr, x, gcon(x));
      return res;
    }
  }

  LoopResult main = sqp_loop(fobj, gptr, x, std::max(1, kMaxIterations - used), nullptr, record);
  x = main.x;
  int total = used + main.accepted;
  if (constrained && gcon(x) < -1e-9) {
    // The merit search can stop within curvature distance of the floor.
    // Least-norm Newton steps on the margin restore feasibility while moving
    // the design as little as possible; a fresh climb of the margin could
    // leave the optimum far behind.
    const Vector2d lb = lower_bounds(), ub = upper_bounds();
    for (int round = 0; round < 10 && gcon(x) < -1e-12; ++round) {
      const Vector2d gg = cache_gradient(gcon, x);
      const double n2 = gg.squaredNorm();
      if (!(n2 > 1e-18)) break;
      const Vector2d next = (x - (gcon(x) / n2) * gg).cwiseMax(lb).cwiseMin(ub);
      if ((next - x).norm() == 0.0) break;
      x = next;
      record(x);
      ++total;
    }
  }
  res.d_star = to_design(x);
  res.iterations = total;
  res.status = main.status;
  res.kkt_residual = kkt_residual(fobj, gptr, x, constrained ? gcon(x) : 1.0);
  return res;
}

}  // namespace rcd::optim
