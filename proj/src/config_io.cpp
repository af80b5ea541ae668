#include "catfeas/config_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace catfeas {

using nlohmann::json;

namespace {

[[noreturn]] void fail_field(const std::string& path, const std::string& why) {
  throw Error("config-error", "field " + path + ": " + why);
}

const json& require_field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) fail_field(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail_field(path + "." + key, "missing");
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail_field(path, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail_field(path, "expected an integer");
  return j.get<int>();
}

Vec as_vec(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() < 2) fail_field(path, "expected an array of >= 2 numbers");
  Vec v;
  v.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(as_number(j[i], path));
  return v;
}

SpherePoint as_point(const json& j, const std::string& path) {
  try {
    return make_sphere_point(as_vec(j, path));
  } catch (const Error& e) {
    fail_field(path, e.what());
  }
}

ConvexSet parse_set(const json& j, const std::string& path) {
  const json& type = require_field(j, "type", path);
  if (!type.is_string()) fail_field(path + ".type", "expected a string");
  const std::string kind = type.get<std::string>();
  if (kind == "ball") {
    GeodesicBall ball;
    ball.center = as_point(require_field(j, "center", path), path + ".center");
    ball.radius = as_number(require_field(j, "radius", path), path + ".radius");
    return ball;
  }
  if (kind == "segment") {
    GeodesicSegment seg;
    seg.a = as_point(require_field(j, "a", path), path + ".a");
    seg.b = as_point(require_field(j, "b", path), path + ".b");
    return seg;
  }
  if (kind == "hull") {
    const json& gens = require_field(j, "generators", path);
    if (!gens.is_array() || gens.empty())
      fail_field(path + ".generators", "expected a non-empty array");
    SphericalHull hull;
    for (std::size_t i = 0; i < gens.size(); ++i)
      hull.generators.push_back(
          as_point(gens[i], path + ".generators[" + std::to_string(i) + "]"));
    return hull;
  }
  fail_field(path + ".type", "unknown set type '" + kind + "' (ball|segment|hull)");
}

json set_to_json(const ConvexSet& set) {
  json j;
  if (const auto* ball = std::get_if<GeodesicBall>(&set)) {
    j["type"] = "ball";
    j["center"] = ball->center.coords;
    j["radius"] = ball->radius;
  } else if (const auto* seg = std::get_if<GeodesicSegment>(&set)) {
    j["type"] = "segment";
    j["a"] = seg->a.coords;
    j["b"] = seg->b.coords;
  } else {
    const auto& hull = std::get<SphericalHull>(set);
    j["type"] = "hull";
    json gens = json::array();
    for (const auto& g : hull.generators) gens.push_back(g.coords);
    j["generators"] = gens;
  }
  return j;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json point_json(const SpherePoint& p) { return json(p.coords); }

}  // namespace

ProblemConfig parse_problem_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error("config-error", std::string("invalid JSON: ") + e.what());
  }

  ProblemConfig cfg;
  const json& space_j = require_field(j, "space", "config");
  const double kappa = as_number(require_field(space_j, "kappa", "space"), "space.kappa");
  const SpherePoint center =
      as_point(require_field(space_j, "cap_center", "space"), "space.cap_center");
  const double cap_radius =
      as_number(require_field(space_j, "cap_radius", "space"), "space.cap_radius");
  const int dim = static_cast<int>(center.coords.size()) - 1;
  ModelSpace space;
  try {
    space = make_model_space(kappa, dim, center, cap_radius);
  } catch (const Error& e) {
    fail_field("space", e.what());
  }
  if (space_j.contains("c_m")) {
    const double c_m = as_number(space_j.at("c_m"), "space.c_m");
    if (!(c_m > 0.0 && c_m <= 1.0)) fail_field("space.c_m", "must lie in (0,1]");
    space.c_m = c_m;
  } else {
    space.c_m = estimate_c_m(space, kDefaultCmSamples, kDefaultCmSeed);
  }
  cfg.scenario.space = space;

  cfg.scenario.set_a = parse_set(require_field(j, "set_a", "config"), "set_a");
  cfg.scenario.set_b = parse_set(require_field(j, "set_b", "config"), "set_b");
  cfg.scenario.x0 = as_point(require_field(j, "x0", "config"), "x0");
  cfg.scenario.name = j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>()
                                                                  : std::string("custom");

  if (j.contains("witnesses")) {
    const json& ws = j.at("witnesses");
    if (!ws.is_array()) fail_field("witnesses", "expected an array");
    for (std::size_t i = 0; i < ws.size(); ++i)
      cfg.scenario.witnesses.push_back(as_point(ws[i], "witnesses[" + std::to_string(i) + "]"));
  }

  const json& solver_j = require_field(j, "solver", "config");
  cfg.solver.max_iterations =
      as_int(require_field(solver_j, "max_iterations", "solver"), "solver.max_iterations");
  cfg.solver.step_tolerance =
      as_number(require_field(solver_j, "step_tolerance", "solver"), "solver.step_tolerance");
  if (solver_j.contains("oracle_grid"))
    cfg.solver.oracle_grid = as_int(solver_j.at("oracle_grid"), "solver.oracle_grid");
  if (solver_j.contains("record_set_distances")) {
    if (!solver_j.at("record_set_distances").is_boolean())
      fail_field("solver.record_set_distances", "expected a boolean");
    cfg.solver.record_set_distances = solver_j.at("record_set_distances").get<bool>();
  }
  if (cfg.solver.max_iterations < 1) fail_field("solver.max_iterations", "must be >= 1");
  if (!(cfg.solver.step_tolerance > 0.0)) fail_field("solver.step_tolerance", "must be positive");
  if (cfg.solver.oracle_grid < 2) fail_field("solver.oracle_grid", "must be >= 2");

  // full geometric validation with field attribution
  try {
    validate_set(cfg.scenario.space, cfg.scenario.set_a);
  } catch (const Error& e) {
    fail_field("set_a", e.what());
  }
  try {
    validate_set(cfg.scenario.space, cfg.scenario.set_b);
  } catch (const Error& e) {
    fail_field("set_b", e.what());
  }
  try {
    require_in_cap(cfg.scenario.space, cfg.scenario.x0);
  } catch (const Error& e) {
    fail_field("x0", e.what());
  }
  for (std::size_t i = 0; i < cfg.scenario.witnesses.size(); ++i) {
    const auto& w = cfg.scenario.witnesses[i];
    if (!contains(cfg.scenario.space, cfg.scenario.set_a, w, 1e-9) ||
        !contains(cfg.scenario.space, cfg.scenario.set_b, w, 1e-9))
      fail_field("witnesses[" + std::to_string(i) + "]", "not in A inter B at tolerance 1e-9");
  }
  return cfg;
}

ProblemConfig load_problem_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io-error", "cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_problem_config(buffer.str());
}

std::string problem_config_json(const ScenarioSpec& scenario, const SolverConfig& solver) {
  json j;
  j["name"] = scenario.name;
  j["space"]["kappa"] = scenario.space.kappa;
  j["space"]["cap_center"] = scenario.space.cap_center.coords;
  j["space"]["cap_radius"] = scenario.space.cap_radius;
  j["space"]["c_m"] = scenario.space.c_m;
  j["set_a"] = set_to_json(scenario.set_a);
  j["set_b"] = set_to_json(scenario.set_b);
  j["x0"] = scenario.x0.coords;
  json ws = json::array();
  for (const auto& w : scenario.witnesses) ws.push_back(w.coords);
  j["witnesses"] = ws;
  j["solver"]["max_iterations"] = solver.max_iterations;
  j["solver"]["step_tolerance"] = solver.step_tolerance;
  j["solver"]["oracle_grid"] = solver.oracle_grid;
  j["solver"]["record_set_distances"] = solver.record_set_distances;
  return j.dump(2) + "\n";
}

std::string format_trace_csv(const IterationTrace& trace) {
  std::string out = "n,x,step_distance,dist_a,dist_b,dist_intersection\n";
  for (std::size_t n = 0; n < trace.iterates.size(); ++n) {
    out += std::to_string(n) + ",\"";
    const Vec& x = trace.iterates[n].coords;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (i) out += ',';
      out += fmt(x[i]);
    }
    out += "\",";
    if (n < trace.step_distances.size()) out += fmt(trace.step_distances[n]);
    out += ',';
    out += fmt(trace.dist_to_a[n]);
    out += ',';
    out += fmt(trace.dist_to_b[n]);
    out += ',';
    if (trace.dist_to_intersection) out += fmt((*trace.dist_to_intersection)[n]);
    out += '\n';
  }
  return out;
}

namespace {

const char* stop_reason_name(StopReason reason) {
  return reason == StopReason::StepTolerance ? "step-tolerance" : "max-iterations";
}

}  // namespace

std::string format_solve_report_json(const IterationTrace& trace) {
  json j;
  j["stop_reason"] = stop_reason_name(trace.stop_reason);
  j["iterations"] = trace.iterates.size() - 1;
  j["final_dist_a"] = trace.dist_to_a.back();
  j["final_dist_b"] = trace.dist_to_b.back();
  if (trace.stop_reason == StopReason::StepTolerance)
    j["limit_point"] = point_json(trace.iterates.back());
  else
    j["limit_point"] = nullptr;
  return j.dump(2) + "\n";
}

std::string format_diagnostics_report_json(const IterationTrace& trace,
                                           const DiagnosticsReport& report) {
  json j;
  j["fejer_min_slack"] = report.fejer_min_slack;
  j["projection_ineq_min_slack"] = report.projection_ineq_min_slack;
  j["max_ineq_min_slack"] = report.max_ineq_min_slack;
  j["asymptotic_regularity"]["epsilon"] = report.asymptotic_regularity.epsilon;
  j["asymptotic_regularity"]["n_epsilon"] = report.asymptotic_regularity.n_epsilon;
  j["asymptotic_regularity"]["n_epsilon_stated"] = report.asymptotic_regularity.n_epsilon_stated;
  j["asymptotic_regularity"]["satisfied_at"] = report.asymptotic_regularity.satisfied_at;
  if (report.regularity_constant_k)
    j["regularity_constant_k"] = *report.regularity_constant_k;
  else
    j["regularity_constant_k"] = nullptr;
  if (report.observed_linear_rate)
    j["observed_linear_rate"] = *report.observed_linear_rate;
  else
    j["observed_linear_rate"] = nullptr;
  if (report.theoretical_linear_rate)
    j["theoretical_linear_rate"] = *report.theoretical_linear_rate;
  else
    j["theoretical_linear_rate"] = nullptr;
  j["asymptotic_center"] = point_json(report.asymptotic_center);
  if (report.limit_point)
    j["limit_point"] = point_json(*report.limit_point);
  else
    j["limit_point"] = nullptr;
  j["estimated_c_m"] = report.estimated_c_m;
  j["convexity_resample_min_slack"] = report.convexity_resample_min_slack;
  j["fejer_cauchy_min_slack"] = report.fejer_cauchy_min_slack;
  j["set_distance_monotone_min_slack"] = report.set_distance_monotone_min_slack;
  j["stop_reason"] = stop_reason_name(trace.stop_reason);
  j["iterations"] = trace.iterates.size() - 1;
  return j.dump(2) + "\n";
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io-error", "cannot write " + tmp.string());
    out << content;
    if (!out.good()) throw Error("io-error", "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("io-error", "rename failed for " + path.string() + ": " + ec.message());
}

}  // namespace catfeas
