#pragma once

#include <json.hpp>
#include <string>

#include "rcd/aero.hpp"
#include "rcd/control.hpp"
#include "rcd/flight_types.hpp"
#include "rcd/lti.hpp"
#include "rcd/optim.hpp"
#include "rcd/reach.hpp"

namespace rcd::io {

// Insertion-ordered documents keep artifact bytes stable run to run.
using Json = nlohmann::ordered_json;

// Read/write failures on the filesystem; the CLI maps these to exit 2.
// Malformed file *content* throws ValidationError (exit 1) instead.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Whole-file text helpers. write_text creates or truncates.
std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

// Canonical artifact serialization: 2-space indent plus a trailing newline.
std::string dump(const Json& j);

// Parses and validates an artifact read from disk.
Json parse(const std::string& text);

Json table_to_json(const aero::AeroTable& table);
aero::AeroTable table_from_json(const Json& j);

Json trim_to_json(const flight::TrimPoint& trim);

Json reach_set_to_json(const reach::ReachSet& set);
reach::ReachSet reach_set_from_json(const Json& j);

// The solver artifact: problem echo, final design, history, KKT residual,
// status string, and one {d, f, g} record per accepted iterate (g is null
// for unconstrained problems).
Json opt_result_to_json(const optim::OptProblem& problem, const optim::OptResult& result);

// state_names labels the state_error_l2 entries (defaults to the
// longitudinal states when empty). When baseline is non-null its scalar
// fields produce percent-improvement entries: 100 * (base - ours) / base.
Json report_to_json(const control::PerformanceReport& report,
                    const std::vector<std::string>& state_names = {},
                    const Json* baseline = nullptr);

// Time series with header t,V,alpha,Q,theta,delta_th,delta_e at 12
// significant digits; only the four physical states are written even when
// the trajectory carries an integrator channel.
std::string trajectory_csv(const lti::Trajectory& traj);

// Two-column scatter for external plotting, 12 significant digits.
std::string pairs_csv(const std::string& header_a, const std::string& header_b,
                      const std::vector<Eigen::VectorXd>& points, int col_a, int col_b);

}  // namespace rcd::io
