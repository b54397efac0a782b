#include "rcd/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rcd/errors.hpp"

namespace rcd::io {

namespace {

std::vector<double> to_vec(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

Eigen::VectorXd from_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Pull a key with a useful message instead of nlohmann's terse one.
const Json& field(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(std::string("artifact: missing field '") + key + "'");
  return *it;
}

std::string sig12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for reading");
  std::ostringstream body;
  body << in.rdbuf();
  if (in.bad()) throw IoError("read failed on " + path);
  return body.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed on " + path);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json parse(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ValidationError("artifact: not valid JSON");
  return j;
}

Json table_to_json(const aero::AeroTable& table) {
  Json j;
  j["axes"] = {{"v", table.axes.v},
               {"alpha", table.axes.alpha},
               {"c", table.axes.c},
               {"w", table.axes.w},
               {"delta_e", table.axes.delta_e}};
  const auto& s = table.config;
  j["surrogate"] = {{"chord_center", s.chord_center},
                    {"chord_wing", s.chord_wing},
                    {"cl0", s.cl0},
                    {"cl_de", s.cl_de},
                    {"cd0", s.cd0},
                    {"oswald", s.oswald},
                    {"cm0", s.cm0},
                    {"sm0", s.sm0},
                    {"sm1", s.sm1},
                    {"cm_de0", s.cm_de0},
                    {"cm_de_slope", s.cm_de_slope}};
  const auto& p = table.params;
  j["params"] = {{"mass", p.mass},
                 {"j_y", p.j_y},
                 {"g", p.g},
                 {"max_thrust", p.max_thrust},
                 {"rho", p.rho},
                 {"thrust_moment_arm", p.thrust_moment_arm}};
  j["lift"] = table.lift;
  j["drag"] = table.drag;
  j["moment"] = table.moment;
  return j;
}

aero::AeroTable table_from_json(const Json& j) {
  try {
    aero::AeroTable table;
    const Json& axes = field(j, "axes");
    table.axes.v = field(axes, "v").get<std::vector<double>>();
    table.axes.alpha = field(axes, "alpha").get<std::vector<double>>();
    table.axes.c = field(axes, "c").get<std::vector<double>>();
    table.axes.w = field(axes, "w").get<std::vector<double>>();
    table.axes.delta_e = field(axes, "delta_e").get<std::vector<double>>();
    const Json& s = field(j, "surrogate");
    table.config.chord_center = field(s, "chord_center").get<double>();
    table.config.chord_wing = field(s, "chord_wing").get<double>();
    table.config.cl0 = field(s, "cl0").get<double>();
    table.config.cl_de = field(s, "cl_de").get<double>();
    table.config.cd0 = field(s, "cd0").get<double>();
    table.config.oswald = field(s, "oswald").get<double>();
    table.config.cm0 = field(s, "cm0").get<double>();
    table.config.sm0 = field(s, "sm0").get<double>();
    table.config.sm1 = field(s, "sm1").get<double>();
    table.config.cm_de0 = field(s, "cm_de0").get<double>();
    table.config.cm_de_slope = field(s, "cm_de_slope").get<double>();
    const Json& p = field(j, "params");
    table.params.mass = field(p, "mass").get<double>();
    table.params.j_y = field(p, "j_y").get<double>();
    table.params.g = field(p, "g").get<double>();
    table.params.max_thrust = field(p, "max_thrust").get<double>();
    table.params.rho = field(p, "rho").get<double>();
    table.params.thrust_moment_arm = field(p, "thrust_moment_arm").get<double>();
    table.lift = field(j, "lift").get<std::vector<double>>();
    table.drag = field(j, "drag").get<std::vector<double>>();
    table.moment = field(j, "moment").get<std::vector<double>>();
    table.validate();
    return table;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("aero table artifact: ") + e.what());
  }
}

Json trim_to_json(const flight::TrimPoint& trim) {
  Json j;
  j["v0"] = trim.v0;
  j["alpha0"] = trim.alpha0;
  j["q0"] = trim.q0;
  j["theta0"] = trim.theta0;
  j["delta_th0"] = trim.dth0;
  j["delta_e0"] = trim.de0;
  j["gamma0"] = trim.gamma0;
  j["residual_norm"] = trim.residual_norm;
  return j;
}

Json reach_set_to_json(const reach::ReachSet& set) {
  Json j;
  j["horizon"] = {{"t0", set.horizon.t0},
                  {"t_final", set.horizon.t_final},
                  {"n_steps", set.horizon.n_steps}};
  j["seed"] = set.seed;
  j["system_fingerprint"] = set.system_fingerprint;
  Json dirs = Json::array();
  for (const auto& d : set.directions) dirs.push_back(to_vec(d));
  j["directions"] = std::move(dirs);
  Json verts = Json::array();
  for (const auto& v : set.vertices) verts.push_back(to_vec(v));
  j["vertices"] = std::move(verts);
  return j;
}

reach::ReachSet reach_set_from_json(const Json& j) {
  try {
    reach::ReachSet set;
    const Json& horizon = field(j, "horizon");
    set.horizon = lti::TimeGrid(field(horizon, "t0").get<double>(),
                                field(horizon, "t_final").get<double>(),
                                field(horizon, "n_steps").get<int>());
    set.seed = field(j, "seed").get<std::uint64_t>();
    set.system_fingerprint = field(j, "system_fingerprint").get<std::string>();
    for (const auto& d : field(j, "directions"))
      set.directions.push_back(from_vec(d.get<std::vector<double>>()));
    for (const auto& v : field(j, "vertices"))
      set.vertices.push_back(from_vec(v.get<std::vector<double>>()));
    if (set.vertices.size() != set.directions.size())
      throw ValidationError("reach set artifact: vertex/direction count mismatch");
    if (set.vertices.empty()) throw ValidationError("reach set artifact: no vertices");
    const Eigen::Index dim = set.vertices.front().size();
    for (const auto& v : set.vertices)
      if (v.size() != dim) throw ValidationError("reach set artifact: ragged vertices");
    for (const auto& d : set.directions)
      if (d.size() != dim) throw ValidationError("reach set artifact: ragged directions");
    return set;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("reach set artifact: ") + e.what());
  }
}

Json opt_result_to_json(const optim::OptProblem& problem, const optim::OptResult& result) {
  Json j;
  j["problem"] = {{"kind", optim::to_string(problem.kind)},
                  {"d0", {problem.d0.c, problem.d0.w}},
                  {"v", to_vec(problem.v)},
                  {"kappa", problem.kappa},
                  {"recipe",
                   {{"airspeed", problem.recipe.airspeed},
                    {"gamma", problem.recipe.gamma},
                    {"horizon", problem.recipe.horizon},
                    {"n_steps", problem.recipe.n_steps},
                    {"directions", problem.recipe.directions},
                    {"seed", problem.recipe.seed}}}};
  j["d_star"] = {result.d_star.c, result.d_star.w};
  j["objective_history"] = result.objective_history;
  j["kkt_residual"] = result.kkt_residual;
  j["status"] = optim::to_string(result.status);
  Json iterates = Json::array();
  const bool constrained = !result.constraint_values.empty();
  for (std::size_t i = 0; i < result.designs.size(); ++i) {
    Json row;
    row["d"] = {result.designs[i][0], result.designs[i][1]};
    row["f"] = result.objective_history[i];
    row["g"] = constrained ? Json(result.constraint_values[i]) : Json(nullptr);
    iterates.push_back(std::move(row));
  }
  j["per_iteration"] = std::move(iterates);
  return j;
}

Json report_to_json(const control::PerformanceReport& report,
                    const std::vector<std::string>& state_names, const Json* baseline) {
  static const std::vector<std::string> kDefaultNames = {"V", "alpha", "Q", "theta", "z"};
  const auto& names = state_names.empty() ? kDefaultNames : state_names;
  if (report.state_error_l2.size() > names.size())
    throw ValidationError("report: more states than state names");

  Json j;
  j["tracking_error_l2"] = report.tracking_error_l2;
  j["control_cost_l2"] = report.control_cost_l2;
  Json per_state;
  for (std::size_t i = 0; i < report.state_error_l2.size(); ++i)
    per_state[names[i]] = report.state_error_l2[i];
  j["state_error_l2"] = std::move(per_state);
  j["saturation_fraction"] = report.saturation_fraction;

  if (baseline != nullptr) {
    const auto percent = [](double base, double ours) -> Json {
      if (base == 0.0) return nullptr;  // no meaningful relative change
      return 100.0 * (base - ours) / base;
    };
    Json gain;
    gain["tracking_error_l2"] = percent(field(*baseline, "tracking_error_l2").get<double>(),
                                        report.tracking_error_l2);
    gain["control_cost_l2"] =
        percent(field(*baseline, "control_cost_l2").get<double>(), report.control_cost_l2);
    Json per_state_gain;
    const Json& base_states = field(*baseline, "state_error_l2");
    for (std::size_t i = 0; i < report.state_error_l2.size(); ++i) {
      if (!base_states.contains(names[i]))
        throw ValidationError("baseline report: missing state " + names[i]);
      per_state_gain[names[i]] =
          percent(base_states[names[i]].get<double>(), report.state_error_l2[i]);
    }
    gain["state_error_l2"] = std::move(per_state_gain);
    j["improvement_percent"] = std::move(gain);
  }
  return j;
}

std::string trajectory_csv(const lti::Trajectory& traj) {
  if (traj.states.size() != traj.times.size() || traj.inputs.size() != traj.times.size())
    throw ValidationError("trajectory csv: needs node-sampled states and inputs");
  std::string out = "t,V,alpha,Q,theta,delta_th,delta_e\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto& x = traj.states[i];
    const auto& u = traj.inputs[i];
    if (x.size() < 4 || u.size() != 2)
      throw ValidationError("trajectory csv: expects 4 states and 2 inputs");
    out += sig12(traj.times[i]);
    for (int k = 0; k < 4; ++k) out += "," + sig12(x[k]);
    out += "," + sig12(u[0]) + "," + sig12(u[1]) + "\n";
  }
  return out;
}

std::string pairs_csv(const std::string& header_a, const std::string& header_b,
                      const std::vector<Eigen::VectorXd>& points, int col_a, int col_b) {
  std::string out = header_a + "," + header_b + "\n";
  for (const auto& p : points) {
    if (p.size() <= std::max(col_a, col_b))
      throw ValidationError("pairs csv: column index out of range");
    out += sig12(p[col_a]) + "," + sig12(p[col_b]) + "\n";
  }
  return out;
}

}  // namespace rcd::io
