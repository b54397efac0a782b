#include "rcd/linprog.hpp"

#include <vector>

#include "rcd/errors.hpp"

namespace rcd::detail {

double phase1_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (b.size() != m) throw ValidationError("phase1_residual: dimension mismatch");

  constexpr double kTol = 1e-11;
  // tableau [A | I | rhs] with rows flipped so rhs >= 0; basis starts as the
  // artificial identity block
  Eigen::MatrixXd t(m, n + m + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double s = b[i] < 0.0 ? -1.0 : 1.0;
    t.row(i).head(n) = s * a.row(i);
    t.row(i).segment(n, m).setZero();
    t(i, n + i) = 1.0;
    t(i, n + m) = s * b[i];
  }
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

  // reduced costs for the phase-1 objective (sum of artificials): the cost of
  // structural column j is -sum_i t(i, j) while all artificials are basic
  Eigen::RowVectorXd reduced = Eigen::RowVectorXd::Zero(n + m);
  for (Eigen::Index j = 0; j < n; ++j) reduced[j] = -t.col(j).sum();
  double objective = t.col(n + m).sum();

  const long max_pivots = 200L * static_cast<long>(n + m);
  for (long pivots = 0; pivots < max_pivots; ++pivots) {
    // Bland: entering = lowest-index column with negative reduced cost
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n + m; ++j)
      if (reduced[j] < -kTol) {
        enter = j;
        break;
      }
    if (enter < 0) return objective < 0.0 ? 0.0 : objective;

    // ratio test; ties go to the lowest basis index (Bland)
    Eigen::Index leave = -1;
    double best_ratio = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (t(i, enter) <= kTol) continue;
      const double ratio = t(i, n + m) / t(i, enter);
      if (leave < 0 || ratio < best_ratio - 1e-14 ||
          (ratio < best_ratio + 1e-14 &&
           basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave < 0) return objective < 0.0 ? 0.0 : objective;  // unbounded column: cannot improve feasibility

    // pivot
    t.row(leave) /= t(leave, enter);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i == leave) continue;
      const double factor = t(i, enter);
      if (factor != 0.0) t.row(i) -= factor * t.row(leave);
    }
    const double rfactor = reduced[enter];
    reduced -= rfactor * t.row(leave).head(n + m);
    // entering variable comes in at the (post-pivot) rhs value of the pivot row
    objective += rfactor * t(leave, n + m);
    basis[static_cast<std::size_t>(leave)] = enter;
  }
  throw SolverError("phase1_residual: pivot limit exceeded");
}

}  // namespace rcd::detail
