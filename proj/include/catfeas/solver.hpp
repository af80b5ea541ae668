#pragma once

#include <cstdint>
#include <optional>

#include "catfeas/convex_sets.hpp"

namespace catfeas {

struct SolverConfig {
  int max_iterations = 10000;
  double step_tolerance = 1e-10;
  bool record_set_distances = false;  // record d(x_n, A inter B) via the oracle sweep
  int oracle_grid = 200;
};

enum class StopReason { StepTolerance, MaxIterations };

// Full record of one alternating-projection run. Iterates are
// x_0, x_1 = P_A(x_0), x_2 = P_B(x_1), ...; odd indices lie in A, even
// indices >= 2 in B. step_distances[n] = d(x_n, x_{n+1}) and is
// non-increasing from index 1 on (the initial step compares an arbitrary
// x_0 against its first projection and carries no guarantee). The problem
// definition travels with the trace so the checkers below stay
// self-contained.
struct IterationTrace {
  ModelSpace space;
  ConvexSet set_a;
  ConvexSet set_b;
  SolverConfig config;
  std::vector<SpherePoint> iterates;
  std::vector<double> step_distances;
  std::vector<double> dist_to_a;
  std::vector<double> dist_to_b;
  std::optional<std::vector<double>> dist_to_intersection;
  StopReason stop_reason = StopReason::MaxIterations;
};

// Runs the alternating projection method from x0. Projections alternate
// P_A then P_B; the step tolerance is evaluated after each completed A,B
// round; max_iterations counts single projections.
IterationTrace alternate(const ModelSpace& space, const ConvexSet& a, const ConvexSet& b,
                         const SpherePoint& x0, const SolverConfig& cfg);

// Fejer monotonicity wrt. A inter B: min over n and witnesses z of
// d(x_n, z) - d(x_{n+1}, z). Throws Error("witness-not-in-intersection")
// when a witness fails membership in either set at 1e-9.
double check_fejer(const IterationTrace& trace, const std::vector<SpherePoint>& witnesses);

// Along-trace projection inequality with witness z:
// min over n, z of d(x_n,z)^2 - d(x_{n+1},z)^2 - c_m d(x_n,x_{n+1})^2.
double check_trace_projection_inequality(const IterationTrace& trace,
                                         const std::vector<SpherePoint>& witnesses);

// Asymptotic-regularity iteration bounds N(epsilon).
//   stated:       floor(D_kappa^2 / (4 eps   c_m))  for eps < D_kappa, else 0
//   conservative: floor(D_kappa^2 / (4 eps^2 c_m))  for eps < D_kappa, else 0
// The conservative variant squares epsilon as the telescoping argument
// behind the bound requires; the stated variant is reported alongside.
struct RateBound {
  long long stated = 0;
  long long conservative = 0;
};
RateBound rate_bound_n_epsilon(const ModelSpace& space, double epsilon);

struct AsymptoticRegularityReport {
  double epsilon = 0.0;
  long long n_epsilon = 0;         // conservative bound, the one asserted
  long long n_epsilon_stated = 0;  // stated variant, reported only
  long long satisfied_at = 0;      // first n with d(x_n, x_{n+1}) <= epsilon
};

// Finds the first step index at or below epsilon and asserts both that the
// step distances are non-increasing (CheckFailure "step-monotonicity") and
// that satisfied_at <= the conservative N(epsilon) (CheckFailure
// "asymptotic-regularity-bound"). Throws Error("trace-too-short") when the
// trace neither reaches epsilon nor spans the bound.
AsymptoticRegularityReport check_asymptotic_regularity(const IterationTrace& trace,
                                                       double epsilon);

// min over n >= 1 of
//   (d(x_n,I)^2 - d(x_{n+1},I)^2)/c_m - max{d(x_n,A), d(x_n,B)}^2
// with I = A inter B from the recorded oracle distances. Tolerance is the
// oracle budget (1e-4), not machine epsilon.
double check_max_inequality(const IterationTrace& trace);

// Empirical infimum of the convexity constant over the cap: samples
// (x, y, z, t), computes the c that makes the convexity inequality tight,
// and returns the minimum, clamped to (0, 1]. Deterministic per seed.
double estimate_c_m(const ModelSpace& space, int samples, std::uint64_t seed);

struct RegularityEstimate {
  double k_hat = 1.0;
  int sample_count = 0;
  SpherePoint worst_point;
};

// Sampled linear-regularity constant: max over sampled x in the cap of
// d(x, A inter B) / max{d(x,A), d(x,B)}, skipping denominators < 1e-8.
RegularityEstimate estimate_regularity_k(const ModelSpace& space, const ConvexSet& a,
                                         const ConvexSet& b, int samples, std::uint64_t seed,
                                         int grid);

struct LinearRateReport {
  double observed = 0.0;
  double theoretical = 0.0;
};

// Per-step contraction of d(x_n, A inter B) against sqrt(1 - c_m/k^2).
// Throws Error("k-below-sqrt-cm") when the theoretical rate is undefined
// and CheckFailure("linear-rate-bound") when observed > theoretical + 1e-3.
LinearRateReport check_linear_rate(const IterationTrace& trace, double k);

struct AsymptoticCenterResult {
  SpherePoint center;
  double radius = 0.0;
};

// Finite-tail surrogate of the asymptotic center: minimizes
// x -> max_{n >= tail_start} d(x, points[n]) by a grid sweep over the cap
// plus 30 cell-halving refinement passes. Grid ties break to the lowest
// index.
AsymptoticCenterResult asymptotic_center(const ModelSpace& space,
                                         const std::vector<SpherePoint>& points,
                                         std::size_t tail_start, int grid);

struct FejerClosureReport {
  double cauchy_min_slack = 0.0;         // 2 d(x_n,I) - d(x_{n+k}, x_n), min over samples
  double set_distance_monotone_min_slack = 0.0;  // d(x_n,I) - d(x_{n+1},I), min over n
  int sampled_pairs = 0;
};

// Cauchy bound d(x_{n+k}, x_n) <= 2 d(x_n, A inter B) and monotonicity of
// d(x_n, A inter B), both within the oracle budget.
FejerClosureReport check_fejer_closure_properties(const IterationTrace& trace,
                                                  const std::vector<SpherePoint>& witnesses);

// Draws a uniformly distributed point of the closed cap (deterministic
// given the generator state).
SpherePoint sample_cap_point(const ModelSpace& space, DeterministicRng& rng);

// ---------------------------------------------------------------------------
// Aggregated diagnostics, the backing of the `diagnose` CLI command.

struct DiagnosticsOptions {
  double epsilon = 1e-3;          // asymptotic-regularity report threshold
  int convexity_resamples = 20000;
  int regularity_samples = 1000;
  std::uint64_t seed = 7;
};

struct DiagnosticsReport {
  double fejer_min_slack = 0.0;
  double projection_ineq_min_slack = 0.0;
  double max_ineq_min_slack = 0.0;
  AsymptoticRegularityReport asymptotic_regularity;
  std::optional<double> regularity_constant_k;
  std::optional<double> observed_linear_rate;
  std::optional<double> theoretical_linear_rate;
  SpherePoint asymptotic_center;
  std::optional<SpherePoint> limit_point;
  double estimated_c_m = 0.0;
  double convexity_resample_min_slack = 0.0;
  double fejer_cauchy_min_slack = 0.0;
  double set_distance_monotone_min_slack = 0.0;
};

struct DiagnosticsResult {
  IterationTrace trace;
  DiagnosticsReport report;
};

// Runs alternate() with set distances recorded, then every checker in turn.
// Each violated guarantee raises CheckFailure naming the inequality
// ("convexity-inequality", "fejer-monotonicity", "projection-inequality",
// "step-monotonicity", "asymptotic-regularity-bound", "max-inequality",
// "linear-rate-bound", "fejer-cauchy-bound", "set-distance-monotonicity").
DiagnosticsResult run_diagnostics(const ModelSpace& space, const ConvexSet& a, const ConvexSet& b,
                                  const SpherePoint& x0,
                                  const std::vector<SpherePoint>& witnesses,
                                  const SolverConfig& cfg, const DiagnosticsOptions& opts);

}  // namespace catfeas
