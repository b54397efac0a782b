// Command-line front end: synthesize aero tables, trim, sample reachable
// sets, evaluate metrics, run the design optimizer, and fly tracking tasks,
// each leaving a reproducible JSON/CSV artifact. Exit codes: 0 success,
// 1 usage or validation, 2 numerical or file failure.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "rcd/aero.hpp"
#include "rcd/control.hpp"
#include "rcd/errors.hpp"
#include "rcd/flight.hpp"
#include "rcd/json_io.hpp"
#include "rcd/lti.hpp"
#include "rcd/optim.hpp"
#include "rcd/reach.hpp"

namespace {

using rcd::io::Json;

rcd::flight::Design parse_design(const std::string& text) {
  double c = 0.0, w = 0.0;
  char tail = '\0';
  if (std::sscanf(text.c_str(), "%lf,%lf%c", &c, &w, &tail) != 2)
    throw rcd::ValidationError("expected a design as c,w (got '" + text + "')");
  return {c, w};
}

Eigen::Vector4d parse_vec4(const std::string& text) {
  Eigen::Vector4d v;
  char tail = '\0';
  if (std::sscanf(text.c_str(), "%lf,%lf,%lf,%lf%c", &v[0], &v[1], &v[2], &v[3], &tail) != 4)
    throw rcd::ValidationError("expected a direction as a,b,c,d (got '" + text + "')");
  return v;
}

// "velocity=4" / "pitch=0.5" -> (tracked channel, reference value)
std::pair<int, double> parse_reference(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos)
    throw rcd::ValidationError("expected --ref channel=value (got '" + text + "')");
  const std::string name = text.substr(0, eq);
  double value = 0.0;
  char tail = '\0';
  if (std::sscanf(text.c_str() + eq + 1, "%lf%c", &value, &tail) != 1)
    throw rcd::ValidationError("expected a numeric reference in '" + text + "'");
  if (name == "velocity") return {0, value};
  if (name == "pitch") return {3, value};
  throw rcd::ValidationError("--ref channel must be velocity or pitch (got '" + name + "')");
}

rcd::aero::AeroTable load_table(const std::string& path) {
  return rcd::io::table_from_json(rcd::io::parse(rcd::io::read_text(path)));
}

// config first so artifacts lead with their provenance
Json artifact(Json config, Json body) {
  Json j;
  j["config"] = std::move(config);
  j.update(body);
  return j;
}

std::string plot_stem(const std::string& out) {
  const std::string ext = ".json";
  if (out.size() > ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0)
    return out.substr(0, out.size() - ext.size());
  return out;
}

void emit_state_plots(const std::string& stem, const std::vector<Eigen::VectorXd>& points) {
  rcd::io::write_text(stem + "_v_alpha.csv", rcd::io::pairs_csv("V", "alpha", points, 0, 1));
  rcd::io::write_text(stem + "_q_theta.csv", rcd::io::pairs_csv("Q", "theta", points, 2, 3));
}

Json matrix_rows(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(row);
  }
  return rows;
}

struct WeightPreset {
  rcd::control::WeightSpec spec;
  std::string name;
};

// The published task weights; "auto" picks the preset matching mode and
// tracked channel.
WeightPreset resolve_weights(const std::string& requested, const std::string& mode,
                             int channel) {
  std::string name = requested;
  if (name == "auto") {
    if (mode == "nonlinear") {
      name = "paper-nonlinear";
    } else {
      name = std::string("paper-") + (mode == "lq" ? "lq" : "lqi") +
             (channel == 0 ? "-velocity" : "-pitch");
    }
  }
  const auto diag = [](std::initializer_list<double> d) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(d.size()));
    Eigen::Index i = 0;
    for (double x : d) v[i++] = x;
    return Eigen::MatrixXd(v.asDiagonal());
  };
  if (name == "paper-lq-velocity")
    return {rcd::control::WeightSpec(diag({1000, 0, 0, 0}), diag({1000, 1000})), name};
  if (name == "paper-lq-pitch")
    return {rcd::control::WeightSpec(diag({0, 0, 0, 1000}), diag({100, 100})), name};
  if (name == "paper-lqi-velocity")
    return {rcd::control::WeightSpec(Eigen::MatrixXd::Identity(5, 5), diag({0.1, 0.1})), name};
  if (name == "paper-lqi-pitch")
    return {rcd::control::WeightSpec(diag({0, 1, 0, 1, 100}), diag({0.1, 10})), name};
  if (name == "paper-nonlinear")
    return {rcd::control::WeightSpec(diag({1, 100, 1, 100, 100}), diag({0.1, 1000})), name};
  throw rcd::ValidationError("unknown weight preset '" + name + "'");
}

int run(int argc, char** argv) {
  CLI::App app{"reachability-based control co-design pipeline"};
  app.require_subcommand(1);

  // gen-aero
  auto* gen = app.add_subcommand("gen-aero", "synthesize an aero table artifact");
  std::string gen_out;
  int gen_resolution = 6;
  gen->add_option("--out", gen_out, "output JSON path")->required();
  gen->add_option("--resolution", gen_resolution, "grid points per axis")->capture_default_str();

  // trim
  auto* trim_cmd = app.add_subcommand("trim", "solve the steady flight condition");
  std::string trim_table, trim_design = "5,12", trim_out;
  double trim_airspeed = 200.0, trim_gamma = 0.0;
  trim_cmd->add_option("--table", trim_table, "aero table JSON")->required();
  trim_cmd->add_option("--design", trim_design, "half-spans c,w in meters")->capture_default_str();
  trim_cmd->add_option("--airspeed", trim_airspeed, "trim airspeed, m/s")->capture_default_str();
  trim_cmd->add_option("--gamma", trim_gamma, "flight path angle, rad")->capture_default_str();
  trim_cmd->add_option("--out", trim_out, "write the artifact here instead of stdout");

  // reach
  auto* reach_cmd = app.add_subcommand("reach", "sample the reachable set at the trim");
  std::string reach_table, reach_design = "5,12", reach_out;
  double reach_airspeed = 200.0, reach_gamma = 0.0, reach_horizon = 2.0;
  int reach_steps = 200, reach_directions = 256;
  std::uint64_t reach_seed = 0;
  bool reach_plots = false;
  reach_cmd->add_option("--table", reach_table, "aero table JSON")->required();
  reach_cmd->add_option("--design", reach_design, "half-spans c,w in meters")->capture_default_str();
  reach_cmd->add_option("--airspeed", reach_airspeed, "trim airspeed, m/s")->capture_default_str();
  reach_cmd->add_option("--gamma", reach_gamma, "flight path angle, rad")->capture_default_str();
  reach_cmd->add_option("--horizon", reach_horizon, "reachability horizon, s")->capture_default_str();
  reach_cmd->add_option("--steps", reach_steps, "control steps on the horizon")->capture_default_str();
  reach_cmd->add_option("--directions", reach_directions, "sampled directions")->capture_default_str();
  reach_cmd->add_option("--seed", reach_seed, "direction-draw seed")->capture_default_str();
  auto* reach_out_opt = reach_cmd->add_option("--out", reach_out, "output JSON path");
  reach_cmd->add_flag("--emit-plot-data", reach_plots, "also write V-alpha / Q-theta CSVs")
      ->needs(reach_out_opt);

  // metrics
  auto* metrics_cmd = app.add_subcommand("metrics", "evaluate a stored reachable set");
  std::string metrics_set, metrics_projection, metrics_table, metrics_design = "5,12";
  bool metrics_volume = false, metrics_from_vertices = false;
  metrics_cmd->add_option("--set", metrics_set, "reach set JSON")->required();
  metrics_cmd->add_flag("--volume", metrics_volume, "print the hull volume");
  metrics_cmd->add_option("--projection", metrics_projection,
                          "print the projection length along a,b,c,d");
  metrics_cmd->add_flag("--from-vertices", metrics_from_vertices,
                        "project the stored vertices instead of re-synthesizing");
  metrics_cmd->add_option("--table", metrics_table, "aero table JSON (synthesis projection)");
  metrics_cmd->add_option("--design", metrics_design, "half-spans c,w (synthesis projection)")->capture_default_str();

  // optimize
  auto* opt_cmd = app.add_subcommand("optimize", "run one planform design problem");
  std::string opt_table, opt_problem = "vm", opt_v = "", opt_d0 = "5,12", opt_out;
  double opt_kappa = 0.15, opt_airspeed = 200.0, opt_gamma = 0.0, opt_horizon = 2.0;
  int opt_steps = 200, opt_directions = 256;
  std::uint64_t opt_seed = 0;
  opt_cmd->add_option("--table", opt_table, "aero table JSON")->required();
  opt_cmd->add_option("--problem", opt_problem, "vm, dm, or vmdc")
      ->capture_default_str()
      ->check(CLI::IsMember({"vm", "dm", "vmdc"}));
  opt_cmd->add_option("--v", opt_v, "projection direction a,b,c,d (default 110 deg)");
  opt_cmd->add_option("--kappa", opt_kappa, "projection floor margin")->capture_default_str();
  opt_cmd->add_option("--d0", opt_d0, "starting design c,w")->capture_default_str();
  opt_cmd->add_option("--airspeed", opt_airspeed, "trim airspeed, m/s")->capture_default_str();
  opt_cmd->add_option("--gamma", opt_gamma, "flight path angle, rad")->capture_default_str();
  opt_cmd->add_option("--horizon", opt_horizon, "reachability horizon, s")->capture_default_str();
  opt_cmd->add_option("--steps", opt_steps, "control steps on the horizon")->capture_default_str();
  opt_cmd->add_option("--directions", opt_directions, "sampled directions")->capture_default_str();
  opt_cmd->add_option("--seed", opt_seed, "direction-draw seed")->capture_default_str();
  opt_cmd->add_option("--out", opt_out, "output JSON path");

  // track
  auto* track_cmd = app.add_subcommand("track", "closed-loop tracking simulation");
  std::string track_table, track_design = "5,12", track_mode = "lq", track_ref = "velocity=4";
  std::string track_weights = "auto", track_baseline, track_csv, track_report;
  double track_airspeed = 200.0, track_gamma = 0.0, track_duration = 30.0;
  int track_steps = 0;
  bool track_plots = false;
  track_cmd->add_option("--table", track_table, "aero table JSON")->required();
  track_cmd->add_option("--design", track_design, "half-spans c,w in meters")->capture_default_str();
  track_cmd->add_option("--mode", track_mode, "lq, lqi, or nonlinear")
      ->capture_default_str()
      ->check(CLI::IsMember({"lq", "lqi", "nonlinear"}));
  track_cmd->add_option("--ref", track_ref, "tracked reference, velocity=4 or pitch=0.5")->capture_default_str();
  track_cmd->add_option("--weights", track_weights,
                        "auto, paper-lq-velocity, paper-lq-pitch, paper-lqi-velocity, "
                        "paper-lqi-pitch, or paper-nonlinear")->capture_default_str();
  track_cmd->add_option("--airspeed", track_airspeed, "trim airspeed, m/s (linear modes)")->capture_default_str();
  track_cmd->add_option("--gamma", track_gamma, "flight path angle, rad (linear modes)")->capture_default_str();
  track_cmd->add_option("--duration", track_duration, "simulation length, s (linear modes)")->capture_default_str();
  track_cmd->add_option("--steps", track_steps,
                        "integration steps (default 3000 linear, 4000 nonlinear)");
  track_cmd->add_option("--baseline", track_baseline,
                        "earlier report JSON; adds percent-improvement fields");
  auto* track_csv_opt = track_cmd->add_option("--out-csv", track_csv, "trajectory CSV path");
  track_cmd->add_option("--out-report", track_report,
                        "write the report here instead of stdout");
  track_cmd->add_flag("--emit-plot-data", track_plots, "also write V-alpha / Q-theta CSVs")
      ->needs(track_csv_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;  // help prints and succeeds; usage errors map to 1
  }

  if (gen->parsed()) {
    const auto table =
        rcd::aero::generate_table(rcd::aero::AeroAxes::uniform(gen_resolution), {}, {});
    Json config{{"command", "gen-aero"}, {"resolution", gen_resolution}, {"out", gen_out}};
    rcd::io::write_text(gen_out, rcd::io::dump(artifact(config, rcd::io::table_to_json(table))));
    std::printf("entries %zu\n", table.size());
    return 0;
  }

  if (trim_cmd->parsed()) {
    const auto table = load_table(trim_table);
    const auto design = parse_design(trim_design);
    const auto trim = rcd::flight::trim(design, table, table.params, trim_airspeed, trim_gamma);
    Json config{{"command", "trim"},          {"table", trim_table},
                {"design", {design.c, design.w}}, {"airspeed", trim_airspeed},
                {"gamma", trim_gamma}};
    const Json out = artifact(config, rcd::io::trim_to_json(trim));
    if (trim_out.empty())
      std::fputs(rcd::io::dump(out).c_str(), stdout);
    else
      rcd::io::write_text(trim_out, rcd::io::dump(out));
    return 0;
  }

  if (reach_cmd->parsed()) {
    const auto table = load_table(reach_table);
    const auto design = parse_design(reach_design);
    const auto trim = rcd::flight::trim(design, table, table.params, reach_airspeed, reach_gamma);
    const auto model = rcd::flight::linearize(design, table, table.params, trim);
    const rcd::lti::TimeGrid grid(0.0, reach_horizon, reach_steps);
    const auto set = rcd::reach::sample_reach_set(model.system, model.input_box,
                                                  reach_directions, grid, reach_seed);
    std::printf("vertices %zu\n", set.vertices.size());
    std::printf("volume %.17g\n", rcd::reach::hull_volume(set.vertices));
    if (!reach_out.empty()) {
      Json config{{"command", "reach"},       {"table", reach_table},
                  {"design", {design.c, design.w}}, {"airspeed", reach_airspeed},
                  {"gamma", reach_gamma},     {"horizon", reach_horizon},
                  {"n_steps", reach_steps},   {"directions", reach_directions},
                  {"seed", reach_seed},       {"emit_plot_data", reach_plots}};
      rcd::io::write_text(reach_out,
                          rcd::io::dump(artifact(config, rcd::io::reach_set_to_json(set))));
      if (reach_plots) emit_state_plots(plot_stem(reach_out), set.vertices);
    }
    return 0;
  }

  if (metrics_cmd->parsed()) {
    const Json stored = rcd::io::parse(rcd::io::read_text(metrics_set));
    const auto set = rcd::io::reach_set_from_json(stored);
    if (!metrics_volume && metrics_projection.empty())
      throw rcd::ValidationError("metrics: request --volume and/or --projection");
    if (metrics_volume) std::printf("volume %.17g\n", rcd::reach::hull_volume(set.vertices));
    if (!metrics_projection.empty()) {
      Eigen::Vector4d v = parse_vec4(metrics_projection);
      const double norm = v.norm();
      if (!(norm > 1e-12) || !v.allFinite())
        throw rcd::ValidationError("metrics: projection direction must be nonzero and finite");
      v /= norm;
      double length = 0.0;
      if (metrics_from_vertices) {
        double hi = -std::numeric_limits<double>::infinity(), lo = hi;
        for (const auto& x : set.vertices) {
          if (x.size() != 4) throw rcd::ValidationError("metrics: expected 4-state vertices");
          hi = std::max(hi, v.dot(x));
          lo = std::max(lo, -v.dot(x));
        }
        length = hi + lo;
      } else {
        if (metrics_table.empty())
          throw rcd::ValidationError(
              "metrics: synthesis projection needs --table (or pass --from-vertices)");
        const auto table = load_table(metrics_table);
        const auto design = parse_design(metrics_design);
        const Json& config = stored.contains("config") ? stored["config"] : Json::object();
        if (!config.contains("airspeed") || !config.contains("gamma"))
          throw rcd::ValidationError(
              "metrics: stored set lacks its trim config; cannot re-synthesize");
        const auto trim = rcd::flight::trim(design, table, table.params,
                                            config["airspeed"].get<double>(),
                                            config["gamma"].get<double>());
        const auto model = rcd::flight::linearize(design, table, table.params, trim);
        if (rcd::reach::system_fingerprint(model.system, model.input_box) !=
            set.system_fingerprint)
          throw rcd::ValidationError(
              "metrics: stored set was sampled from a different system than "
              "--table/--design reproduce");
        length = rcd::reach::support_length(model.system, model.input_box, v, set.horizon);
      }
      std::printf("projection %.17g\n", length);
    }
    return 0;
  }

  if (opt_cmd->parsed()) {
    const auto table = load_table(opt_table);
    rcd::optim::ReachRecipe recipe;
    recipe.airspeed = opt_airspeed;
    recipe.gamma = opt_gamma;
    recipe.horizon = opt_horizon;
    recipe.n_steps = opt_steps;
    recipe.directions = opt_directions;
    recipe.seed = opt_seed;
    const Eigen::Vector4d v =
        opt_v.empty() ? rcd::optim::default_direction() : parse_vec4(opt_v);
    const rcd::optim::ProblemKind kind = opt_problem == "vm"   ? rcd::optim::ProblemKind::kVm
                                         : opt_problem == "dm" ? rcd::optim::ProblemKind::kDm
                                                               : rcd::optim::ProblemKind::kVmdc;
    const rcd::optim::OptProblem problem(kind, parse_design(opt_d0), recipe, v, opt_kappa);
    const rcd::optim::MetricContext ctx(table, table.params, recipe);
    const auto result = rcd::optim::solve(problem, rcd::optim::make_evaluators(problem, ctx));
    std::printf("status %s\n", rcd::optim::to_string(result.status));
    std::printf("d_star %.17g %.17g\n", result.d_star.c, result.d_star.w);
    std::printf("objective %.17g\n", result.objective_history.back());
    std::printf("kkt %.17g\n", result.kkt_residual);
    if (!opt_out.empty()) {
      Json config{{"command", "optimize"}, {"table", opt_table},
                  {"problem", opt_problem}, {"d0", {problem.d0.c, problem.d0.w}},
                  {"v", {problem.v[0], problem.v[1], problem.v[2], problem.v[3]}},
                  {"kappa", opt_kappa},     {"airspeed", opt_airspeed},
                  {"gamma", opt_gamma},     {"horizon", opt_horizon},
                  {"n_steps", opt_steps},   {"directions", opt_directions},
                  {"seed", opt_seed}};
      rcd::io::write_text(
          opt_out, rcd::io::dump(artifact(config, rcd::io::opt_result_to_json(problem, result))));
    }
    return 0;
  }

  // track
  const auto table = load_table(track_table);
  const auto design = parse_design(track_design);
  const auto [channel, ref_value] = parse_reference(track_ref);
  const auto weights = resolve_weights(track_weights, track_mode, channel);

  rcd::lti::Trajectory traj;
  rcd::control::PerformanceReport report;
  double duration = track_duration;
  int n_steps = track_steps;
  if (track_mode == "nonlinear") {
    const auto phases = rcd::control::climb_then_cruise();
    duration = 0.0;
    for (const auto& ph : phases) duration += ph.duration;
    if (n_steps <= 0) n_steps = 4000;
    const rcd::lti::TimeGrid grid(0.0, duration, n_steps);
    std::tie(traj, report) = rcd::control::simulate_nonlinear_tracking(
        design, table, table.params, phases, weights.spec, grid);
  } else {
    if (n_steps <= 0) n_steps = 3000;
    const auto trim = rcd::flight::trim(design, table, table.params, track_airspeed, track_gamma);
    const auto model = rcd::flight::linearize(design, table, table.params, trim);
    Eigen::RowVectorXd c_row = Eigen::RowVectorXd::Zero(4);
    c_row[channel] = 1.0;
    const auto mode = track_mode == "lq" ? rcd::control::TrackingMode::kLqFinite
                                         : rcd::control::TrackingMode::kLqi;
    const rcd::control::TrackingTask task(mode, ref_value, c_row, duration, n_steps);
    std::tie(traj, report) =
        rcd::control::simulate_linear_tracking(model.system, model.input_box, task,
                                               weights.spec, task.grid());
  }

  Json config{{"command", "track"},
              {"table", track_table},
              {"design", {design.c, design.w}},
              {"mode", track_mode},
              {"ref", track_ref},
              {"weights", weights.name},
              {"q", matrix_rows(weights.spec.q)},
              {"r", matrix_rows(weights.spec.r)},
              {"airspeed", track_airspeed},
              {"gamma", track_gamma},
              {"duration", duration},
              {"n_steps", n_steps},
              {"baseline", track_baseline.empty() ? Json(nullptr) : Json(track_baseline)},
              {"emit_plot_data", track_plots}};
  Json report_json;
  if (track_baseline.empty()) {
    report_json = artifact(config, rcd::io::report_to_json(report));
  } else {
    const Json baseline = rcd::io::parse(rcd::io::read_text(track_baseline));
    report_json = artifact(config, rcd::io::report_to_json(report, {}, &baseline));
  }
  if (track_report.empty())
    std::fputs(rcd::io::dump(report_json).c_str(), stdout);
  else
    rcd::io::write_text(track_report, rcd::io::dump(report_json));
  if (!track_csv.empty()) {
    rcd::io::write_text(track_csv, rcd::io::trajectory_csv(traj));
    if (track_plots) {
      const std::string stem =
          track_csv.size() > 4 && track_csv.compare(track_csv.size() - 4, 4, ".csv") == 0
              ? track_csv.substr(0, track_csv.size() - 4)
              : track_csv;
      emit_state_plots(stem, traj.states);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const rcd::TrimFailure& e) {
    std::cerr << "numerical failure: " << e.what()
              << " (residual " << e.residual_norm << ")\n";
    return 2;
  } catch (const rcd::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const rcd::io::IoError& e) {
    std::cerr << "io failure: " << e.what() << "\n";
    return 2;
  } catch (const rcd::ValidationError& e) {
    std::cerr << "invalid request: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
