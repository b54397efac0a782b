#pragma once

#include <Eigen/Dense>

namespace rcd::detail {

// Phase-1 simplex for the feasibility system A x = b, x >= 0: minimizes the
// total artificial-variable mass, i.e. the L1 equation residual at the best
// nonnegative x. Returns that residual (0 within roundoff iff the system is
// feasible). Bland's rule, so the iteration cannot cycle.
double phase1_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

}  // namespace rcd::detail
