// cat_feas: alternating projections on positive-curvature model spaces.
//
// Subcommands
//   solve        run the alternating projection method on a config
//   diagnose     run the solver plus every convergence checker
//   estimate-cm  estimate the convexity constant of a cap
//   scenario     list built-in scenarios or emit them as config files
//
// Exit codes: 0 success / all checks pass, 1 config or geometry error,
// 2 stopped at max_iterations, 3 a mathematical guarantee failed
// (diagnose). Errors print one machine-parsable line on stderr.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "catfeas/config_io.hpp"

namespace fs = std::filesystem;
using namespace catfeas;

namespace {

bool verbose_logging() {
  const char* env = std::getenv("CAT_FEAS_LOG");
  return env != nullptr && env[0] != '\0';
}

void log_step(const std::string& message) {
  if (verbose_logging()) std::cerr << "cat-feas: " << message << "\n";
}

int print_error(const Error& e) {
  std::cerr << "cat-feas: error: " << e.what() << "\n";
  return dynamic_cast<const CheckFailure*>(&e) != nullptr ? 3 : 1;
}

int run_solve(const std::string& config_path, const std::string& out_dir) {
  const ProblemConfig cfg = load_problem_config(config_path);
  log_step("solving scenario '" + cfg.scenario.name + "'");
  const IterationTrace trace =
      alternate(cfg.scenario.space, cfg.scenario.set_a, cfg.scenario.set_b, cfg.scenario.x0,
                cfg.solver);
  fs::create_directories(out_dir);
  write_file_atomic(fs::path(out_dir) / "trace.csv", format_trace_csv(trace));
  write_file_atomic(fs::path(out_dir) / "report.json", format_solve_report_json(trace));
  log_step("wrote trace.csv and report.json");
  return trace.stop_reason == StopReason::StepTolerance ? 0 : 2;
}

int run_diagnose(const std::string& config_path, const std::string& out_dir, std::uint64_t seed,
                 int grid_override, double epsilon) {
  const ProblemConfig cfg = load_problem_config(config_path);
  SolverConfig solver = cfg.solver;
  if (grid_override > 0) solver.oracle_grid = grid_override;
  DiagnosticsOptions opts;
  opts.seed = seed;
  opts.epsilon = epsilon;
  log_step("diagnosing scenario '" + cfg.scenario.name + "'");
  const DiagnosticsResult result =
      run_diagnostics(cfg.scenario.space, cfg.scenario.set_a, cfg.scenario.set_b, cfg.scenario.x0,
                      cfg.scenario.witnesses, solver, opts);
  fs::create_directories(out_dir);
  write_file_atomic(fs::path(out_dir) / "trace.csv", format_trace_csv(result.trace));
  write_file_atomic(fs::path(out_dir) / "report.json",
                    format_diagnostics_report_json(result.trace, result.report));
  log_step("wrote trace.csv and report.json");
  return result.trace.stop_reason == StopReason::StepTolerance ? 0 : 2;
}

int run_estimate_cm(double kappa, double cap_radius, int samples, std::uint64_t seed, int dim) {
  Vec center(static_cast<std::size_t>(dim) + 1, 0.0);
  center.back() = 1.0;
  const ModelSpace space = make_model_space(kappa, dim, SpherePoint{center}, cap_radius);
  const double c_m = estimate_c_m(space, samples, seed);
  std::printf("c_m = %.17g (samples = %d, seed = %llu)\n", c_m, samples,
              static_cast<unsigned long long>(seed));
  return 0;
}

int run_scenario_list() {
  std::printf("paper-su2\nball-pair\n");
  return 0;
}

int run_scenario_emit(const std::string& name, const std::string& out_dir, std::uint64_t seed,
                      double overlap) {
  ScenarioSpec spec;
  if (name == "paper-su2") {
    spec = paper_example();
  } else if (name == "ball-pair") {
    spec = random_ball_pair(seed, overlap);
  } else {
    throw Error("unknown-scenario", "no built-in scenario named '" + name + "'");
  }
  SolverConfig solver;
  solver.step_tolerance = 1e-10;
  solver.max_iterations = 10000;
  fs::create_directories(out_dir);
  const fs::path path = fs::path(out_dir) / (name + ".json");
  write_file_atomic(path, problem_config_json(spec, solver));
  std::printf("%s\n", path.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alternating projections and convergence diagnostics on spherical caps"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  std::uint64_t seed = 7;
  int grid = 0;
  double epsilon = 1e-3;

  CLI::App* solve = app.add_subcommand("solve", "run the alternating projection method");
  solve->add_option("--config", config_path, "problem config (JSON)")->required();
  solve->add_option("--out", out_dir, "output directory");

  CLI::App* diagnose = app.add_subcommand("diagnose", "solve and verify every guarantee");
  diagnose->add_option("--config", config_path, "problem config (JSON)")->required();
  diagnose->add_option("--out", out_dir, "output directory");
  diagnose->add_option("--seed", seed, "seed for resampling checks");
  diagnose->add_option("--grid", grid, "override solver.oracle_grid");
  diagnose->add_option("--epsilon", epsilon, "asymptotic-regularity threshold");

  double kappa = 1.0, cap_radius = 0.3;
  int samples = 100000, dim = 2;
  std::uint64_t cm_seed = 42;
  CLI::App* estimate = app.add_subcommand("estimate-cm", "estimate the convexity constant");
  estimate->add_option("--kappa", kappa, "curvature (> 0)");
  estimate->add_option("--cap-radius", cap_radius, "cap radius in unit-sphere radians (< pi/4)")
      ->required();
  estimate->add_option("--samples", samples, "sample count (>= 100)");
  estimate->add_option("--seed", cm_seed, "sampling seed");
  estimate->add_option("--dim", dim, "sphere dimension n (points in R^(n+1))");

  CLI::App* scenario = app.add_subcommand("scenario", "built-in scenarios");
  CLI::App* scn_list = scenario->add_subcommand("list", "print scenario names");
  std::string emit_name;
  double overlap = 0.05;
  CLI::App* scn_emit = scenario->add_subcommand("emit", "write a scenario as a config file");
  scn_emit->add_option("name", emit_name, "scenario name")->required();
  scn_emit->add_option("--out", out_dir, "output directory");
  scn_emit->add_option("--seed", seed, "scenario seed (ball-pair)");
  scn_emit->add_option("--overlap", overlap, "witness depth (ball-pair)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return run_solve(config_path, out_dir);
    if (diagnose->parsed()) return run_diagnose(config_path, out_dir, seed, grid, epsilon);
    if (estimate->parsed()) return run_estimate_cm(kappa, cap_radius, samples, cm_seed, dim);
    if (scenario->parsed()) {
      if (scn_list->parsed()) return run_scenario_list();
      if (scn_emit->parsed()) return run_scenario_emit(emit_name, out_dir, seed, overlap);
      std::cerr << "cat-feas: error: config-error: scenario needs 'list' or 'emit'\n";
      return 1;
    }
  } catch (const Error& e) {
    return print_error(e);
  } catch (const std::exception& e) {
    std::cerr << "cat-feas: error: internal-error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
