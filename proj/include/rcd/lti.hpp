#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace rcd::lti {

// Continuous-time linear model dx/dt = a*x + b*u. Dimensions are dynamic so
// the same operations serve scalar and double-integrator test systems as well
// as the 4-state flight model.
struct LtiSystem {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  std::vector<std::string> state_labels;
  std::vector<std::string> input_labels;

  LtiSystem() = default;
  // Throws ValidationError unless a is square, b row-conforming, both finite.
  LtiSystem(Eigen::MatrixXd a_in, Eigen::MatrixXd b_in,
            std::vector<std::string> state_labels_in = {},
            std::vector<std::string> input_labels_in = {});

  [[nodiscard]] Eigen::Index states() const { return a.rows(); }
  [[nodiscard]] Eigen::Index inputs() const { return b.cols(); }
};

// Uniform grid over [t0, t_final] with n_steps steps of width dt().
struct TimeGrid {
  double t0 = 0.0;
  double t_final = 1.0;
  int n_steps = 1;

  TimeGrid() = default;
  TimeGrid(double t0_in, double t_final_in, int n_steps_in);  // validates

  [[nodiscard]] double dt() const { return (t_final - t0) / n_steps; }
};

struct Trajectory {
  std::vector<double> times;                // n_steps + 1 entries
  std::vector<Eigen::VectorXd> states;      // n_steps + 1 entries
  std::vector<Eigen::VectorXd> inputs;      // n_steps entries when held per step;
                                            // tracking sims record n_steps + 1 node samples
};

// e^(m*t). Exact identity for t == 0; throws ValidationError on non-finite
// input. Scaling-and-squaring Pade evaluation, relative accuracy ~1e-12.
Eigen::MatrixXd expm(const Eigen::MatrixXd& m, double t);

// Exact zero-order-hold discretization over one step: returns (a_d, b_d) with
// x[k+1] = a_d x[k] + b_d u[k], computed from the exponential of the
// augmented block matrix [[a, b], [0, 0]].
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> discretize(const LtiSystem& sys, double dt);

// Propagates x0 under the per-step constant inputs across the grid using the
// exact ZOH step matrices. inputs.size() must equal grid.n_steps.
Trajectory propagate_pwc(const LtiSystem& sys, const Eigen::VectorXd& x0,
                         const std::vector<Eigen::VectorXd>& inputs, const TimeGrid& grid);

}  // namespace rcd::lti
