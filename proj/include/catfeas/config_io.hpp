#pragma once

#include <filesystem>
#include <string>

#include "catfeas/scenarios.hpp"

namespace catfeas {

// One self-contained experiment: the problem plus how to solve it.
struct ProblemConfig {
  ScenarioSpec scenario;
  SolverConfig solver;
};

// Parses and validates a config document. Every validation failure names
// the offending field in the message (codes: "config-error" plus the
// geometry codes raised by the underlying constructors).
ProblemConfig parse_problem_config(const std::string& text);
ProblemConfig load_problem_config(const std::filesystem::path& path);

// Serializes a problem back to the config schema, embedding the resolved
// c_m so downstream runs skip re-estimation.
std::string problem_config_json(const ScenarioSpec& scenario, const SolverConfig& solver);

// trace.csv: n, x (quoted comma-joined coordinates), step_distance,
// dist_a, dist_b, dist_intersection (empty cells where not defined).
std::string format_trace_csv(const IterationTrace& trace);

// report.json for a plain solve.
std::string format_solve_report_json(const IterationTrace& trace);

// report.json for diagnose; keys mirror the DiagnosticsReport fields.
std::string format_diagnostics_report_json(const IterationTrace& trace,
                                           const DiagnosticsReport& report);

// Writes via a temporary file in the same directory plus rename, so no
// partial file survives an error.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace catfeas
