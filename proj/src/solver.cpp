#include "catfeas/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <string>

namespace catfeas {

namespace {

constexpr double kExactTol = 1e-10;
constexpr double kOracleBudget = 1e-4;

void require_witnesses(const IterationTrace& trace, const std::vector<SpherePoint>& witnesses) {
  for (const auto& z : witnesses) {
    if (!contains(trace.space, trace.set_a, z, 1e-9) ||
        !contains(trace.space, trace.set_b, z, 1e-9))
      throw Error("witness-not-in-intersection", "witness fails membership in A inter B");
  }
}

const std::vector<double>& require_intersection_distances(const IterationTrace& trace) {
  if (!trace.dist_to_intersection)
    throw Error("missing-intersection-distances",
                "run alternate() with record_set_distances to use this check");
  return *trace.dist_to_intersection;
}

}  // namespace

IterationTrace alternate(const ModelSpace& space, const ConvexSet& a, const ConvexSet& b,
                         const SpherePoint& x0, const SolverConfig& cfg) {
  if (cfg.max_iterations < 1) throw Error("parameter-out-of-range", "max_iterations must be >= 1");
  if (!(cfg.step_tolerance > 0.0))
    throw Error("parameter-out-of-range", "step_tolerance must be positive");
  require_in_cap(space, x0);
  validate_set(space, a);
  validate_set(space, b);

  IterationTrace trace;
  trace.space = space;
  trace.set_a = a;
  trace.set_b = b;
  trace.config = cfg;
  trace.iterates.push_back(x0);
  trace.stop_reason = StopReason::MaxIterations;

  int steps = 0;
  while (steps < cfg.max_iterations) {
    // one A,B round; the tolerance is evaluated on the round's last step
    bool round_complete = false;
    for (int half = 0; half < 2 && steps < cfg.max_iterations; ++half) {
      const ConvexSet& target = (half == 0) ? a : b;
      const SpherePoint next = project(space, target, trace.iterates.back());
      trace.step_distances.push_back(distance(space, trace.iterates.back(), next));
      trace.iterates.push_back(next);
      ++steps;
      round_complete = (half == 1);
    }
    if (round_complete && trace.step_distances.back() < cfg.step_tolerance) {
      trace.stop_reason = StopReason::StepTolerance;
      break;
    }
  }

  trace.dist_to_a.reserve(trace.iterates.size());
  trace.dist_to_b.reserve(trace.iterates.size());
  for (const auto& x : trace.iterates) {
    trace.dist_to_a.push_back(distance_to_set(space, a, x));
    trace.dist_to_b.push_back(distance_to_set(space, b, x));
  }

  if (cfg.record_set_distances) {
    IntersectionSampler sampler(space, a, b, cfg.oracle_grid);
    std::vector<double> di;
    di.reserve(trace.iterates.size());
    for (const auto& x : trace.iterates) di.push_back(sampler.distance_from(x));
    trace.dist_to_intersection = std::move(di);
  }
  return trace;
}

double check_fejer(const IterationTrace& trace, const std::vector<SpherePoint>& witnesses) {
  require_witnesses(trace, witnesses);
  double min_slack = std::numeric_limits<double>::infinity();
  for (const auto& z : witnesses) {
    double prev = distance(trace.space, trace.iterates.front(), z);
    for (std::size_t n = 1; n < trace.iterates.size(); ++n) {
      const double cur = distance(trace.space, trace.iterates[n], z);
      min_slack = std::min(min_slack, prev - cur);
      prev = cur;
    }
  }
  return min_slack;
}

double check_trace_projection_inequality(const IterationTrace& trace,
                                         const std::vector<SpherePoint>& witnesses) {
  require_witnesses(trace, witnesses);
  const double c_m = trace.space.c_m;
  double min_slack = std::numeric_limits<double>::infinity();
  for (const auto& z : witnesses) {
    for (std::size_t n = 0; n + 1 < trace.iterates.size(); ++n) {
      const double dn = distance(trace.space, trace.iterates[n], z);
      const double dn1 = distance(trace.space, trace.iterates[n + 1], z);
      const double step = trace.step_distances[n];
      min_slack = std::min(min_slack, dn * dn - dn1 * dn1 - c_m * step * step);
    }
  }
  return min_slack;
}

namespace {

// floor with saturation; the bounds blow up for tiny epsilon
long long saturating_floor(double v) {
  constexpr double kMax = 9.0e18;
  return v >= kMax ? static_cast<long long>(kMax) : static_cast<long long>(v);
}

}  // namespace

RateBound rate_bound_n_epsilon(const ModelSpace& space, double epsilon) {
  if (!(epsilon > 0.0)) throw Error("nonpositive-epsilon", "epsilon must be positive");
  const double d_kappa = space.diameter_limit();
  RateBound bound;
  if (epsilon < d_kappa) {
    bound.stated = saturating_floor(d_kappa * d_kappa / (4.0 * epsilon * space.c_m));
    bound.conservative =
        saturating_floor(d_kappa * d_kappa / (4.0 * epsilon * epsilon * space.c_m));
  }
  return bound;
}

AsymptoticRegularityReport check_asymptotic_regularity(const IterationTrace& trace,
                                                       double epsilon) {
  const RateBound bound = rate_bound_n_epsilon(trace.space, epsilon);

  AsymptoticRegularityReport report;
  report.epsilon = epsilon;
  report.n_epsilon = bound.conservative;
  report.n_epsilon_stated = bound.stated;

  // Monotonicity starts at step index 1: d(x_0, x_1) compares an arbitrary
  // starting point against the first projection and carries no guarantee.
  for (std::size_t i = 1; i + 1 < trace.step_distances.size(); ++i) {
    if (trace.step_distances[i + 1] > trace.step_distances[i] + 1e-12)
      throw CheckFailure("step-monotonicity",
                         "step distances increase at n=" + std::to_string(i));
  }

  // first index from which every later step stays at or below epsilon
  long long satisfied_at = -1;
  for (std::size_t i = trace.step_distances.size(); i-- > 0;) {
    if (trace.step_distances[i] <= epsilon)
      satisfied_at = static_cast<long long>(i);
    else
      break;
  }
  if (satisfied_at < 0) {
    if (static_cast<long long>(trace.step_distances.size()) <= bound.conservative)
      throw Error("trace-too-short",
                  "no step at or below epsilon and the trace does not span N(epsilon)");
    throw CheckFailure("asymptotic-regularity-bound",
                       "no step <= epsilon within the conservative N(epsilon)");
  }
  report.satisfied_at = satisfied_at;
  if (satisfied_at > bound.conservative)
    throw CheckFailure("asymptotic-regularity-bound",
                       "first step <= epsilon occurs after the conservative N(epsilon)");
  return report;
}

double check_max_inequality(const IterationTrace& trace) {
  const auto& di = require_intersection_distances(trace);
  const double c_m = trace.space.c_m;
  double min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n + 1 < trace.iterates.size(); ++n) {
    const double worst = std::max(trace.dist_to_a[n], trace.dist_to_b[n]);
    const double rhs = (di[n] * di[n] - di[n + 1] * di[n + 1]) / c_m;
    min_slack = std::min(min_slack, rhs - worst * worst);
  }
  return min_slack;
}

SpherePoint sample_cap_point(const ModelSpace& space, DeterministicRng& rng) {
  const Vec& c = space.cap_center.coords;
  const double r = space.cap_radius;
  const int n = space.dim;

  // polar angle with density sin^(n-1) on [0, r], by rejection from uniform
  double theta = 0.0;
  const double sin_r = std::sin(r);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    theta = rng.next_double() * r;
    const double accept = std::pow(std::sin(theta) / sin_r, n - 1);
    if (rng.next_double() <= accept) break;
  }

  Vec u(c.size(), 0.0);
  double len = 0.0;
  while (len < 1e-12) {
    for (double& v : u) v = rng.next_gaussian();
    const double along = dot(u, c);
    u = axpy(u, -along, c);
    len = norm(u);
  }
  u = scaled(u, 1.0 / len);
  return SpherePoint{normalized(axpy(scaled(c, std::cos(theta)), std::sin(theta), u))};
}

namespace {

double estimate_c_m_uncached(const ModelSpace& space, int samples, std::uint64_t seed);

}  // namespace

double estimate_c_m(const ModelSpace& space, int samples, std::uint64_t seed) {
  // pure function of (cap, samples, seed); memoized because scenario
  // construction re-estimates the same cap many times
  static std::mutex mutex;
  static std::map<std::vector<double>, double> memo;
  std::vector<double> key{space.kappa, static_cast<double>(space.dim), space.cap_radius,
                          static_cast<double>(samples), static_cast<double>(seed)};
  key.insert(key.end(), space.cap_center.coords.begin(), space.cap_center.coords.end());
  {
    std::lock_guard<std::mutex> lock(mutex);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
  }
  const double value = estimate_c_m_uncached(space, samples, seed);
  std::lock_guard<std::mutex> lock(mutex);
  memo.emplace(std::move(key), value);
  return value;
}

namespace {

double estimate_c_m_uncached(const ModelSpace& space, int samples, std::uint64_t seed) {
  if (samples < 100) throw Error("parameter-out-of-range", "estimate_c_m needs >= 100 samples");
  DeterministicRng rng(seed);
  double min_c = std::numeric_limits<double>::infinity();
  int valid = 0;
  for (int i = 0; i < samples; ++i) {
    const SpherePoint x = sample_cap_point(space, rng);
    const SpherePoint y = sample_cap_point(space, rng);
    const SpherePoint z = sample_cap_point(space, rng);
    const double t = rng.next_double();
    const double dxy = distance(space, x, y);
    const double denom = t * (1.0 - t) * dxy * dxy;
    if (denom <= 1e-12) continue;
    const Geodesic g = make_geodesic(space, x, y);
    const double dzx = distance(space, z, x);
    const double dzy = distance(space, z, y);
    const double dzg = distance(space, z, geodesic_eval(g, t));
    const double numer = (1.0 - t) * dzx * dzx + t * dzy * dzy - dzg * dzg;
    min_c = std::min(min_c, numer / denom);
    ++valid;
  }
  if (valid < 10)
    throw Error("insufficient-valid-samples",
                "only " + std::to_string(valid) + " samples passed the denominator filter");
  return std::clamp(min_c, 1e-12, 1.0);
}

}  // namespace

RegularityEstimate estimate_regularity_k(const ModelSpace& space, const ConvexSet& a,
                                         const ConvexSet& b, int samples, std::uint64_t seed,
                                         int grid) {
  if (samples < 1) throw Error("parameter-out-of-range", "need at least one sample");
  IntersectionSampler sampler(space, a, b, grid);
  DeterministicRng rng(seed);

  RegularityEstimate estimate;
  estimate.k_hat = 1.0;
  estimate.worst_point = space.cap_center;
  for (int i = 0; i < samples; ++i) {
    const SpherePoint x = sample_cap_point(space, rng);
    const double denom = std::max(distance_to_set(space, a, x), distance_to_set(space, b, x));
    if (denom < 1e-8) continue;
    const double ratio = sampler.distance_from(x) / denom;
    ++estimate.sample_count;
    if (ratio > estimate.k_hat) {
      estimate.k_hat = ratio;
      estimate.worst_point = x;
    }
  }
  return estimate;
}

LinearRateReport check_linear_rate(const IterationTrace& trace, double k) {
  const auto& di = require_intersection_distances(trace);
  const double c_m = trace.space.c_m;
  if (!(k * k >= c_m))
    throw Error("k-below-sqrt-cm", "theoretical rate undefined for k < sqrt(c_m)");

  LinearRateReport report;
  report.theoretical = std::sqrt(1.0 - c_m / (k * k));
  report.observed = 0.0;
  for (std::size_t n = 1; n + 1 < di.size(); ++n) {
    if (di[n + 1] <= kOracleBudget || di[n] <= 0.0) continue;
    report.observed = std::max(report.observed, di[n + 1] / di[n]);
  }
  if (report.observed > report.theoretical + 1e-3)
    throw CheckFailure("linear-rate-bound", "observed contraction " +
                                                std::to_string(report.observed) +
                                                " exceeds sqrt(1 - c_m/k^2) + 1e-3");
  return report;
}

AsymptoticCenterResult asymptotic_center(const ModelSpace& space,
                                         const std::vector<SpherePoint>& points,
                                         std::size_t tail_start, int grid) {
  if (tail_start >= points.size()) throw Error("empty-tail", "tail_start is past the last point");
  if (grid < 8) throw Error("parameter-out-of-range", "asymptotic_center needs grid >= 8");
  for (const auto& p : points) require_in_cap(space, p);

  const double inv_sqrt_kappa = 1.0 / std::sqrt(space.kappa);
  const auto objective = [&](const Vec& x) {
    double worst = 0.0;
    for (std::size_t n = tail_start; n < points.size(); ++n)
      worst = std::max(worst, unit_angle(x, points[n].coords));
    return worst;
  };

  // coarse sweep of the whole cap through the ball parameterization
  const ConvexSet cap_ball = GeodesicBall{space.cap_center, space.cap_radius * inv_sqrt_kappa};
  Vec best = sweep_minimize_over_set(space, cap_ball, grid, [&](const SpherePoint& p) {
               return objective(p.coords);
             }, /*passes=*/0).coords;
  double best_value = objective(best);

  // Minimax refinement. Plain coordinate stencils stall inside the V-shaped
  // valley of a max of distances, so each pass also steps toward the mean
  // tangent direction of the currently-farthest points.
  const auto walk = [](const Vec& x, const Vec& dir, double h) {
    Vec u = axpy(dir, -dot(dir, x), x);
    const double n = norm(u);
    if (n < 1e-300) return x;
    u = scaled(u, 1.0 / n);
    return normalized(axpy(scaled(x, std::cos(h)), std::sin(h), u));
  };

  double h = 2.0 * space.cap_radius / grid;
  for (int pass = 0; pass < 30; ++pass) {
    bool improved = true;
    // the guard stops ulp-sized improvement crawls at large step sizes
    for (int inner = 0; improved && inner < 200; ++inner) {
      improved = false;
      std::vector<Vec> candidates;
      for (std::size_t axis = 0; axis < best.size(); ++axis) {
        Vec e(best.size(), 0.0);
        e[axis] = 1.0;
        candidates.push_back(walk(best, e, h));
        candidates.push_back(walk(best, e, -h));
      }
      // active-set direction: mean of tangents toward the farthest points
      Vec active_dir(best.size(), 0.0);
      for (std::size_t n = tail_start; n < points.size(); ++n) {
        if (unit_angle(best, points[n].coords) >= best_value - 1e-13 - 1e-9 * best_value) {
          Vec t = axpy(points[n].coords, -dot(points[n].coords, best), best);
          const double tn = norm(t);
          if (tn > 1e-300) active_dir = axpy(active_dir, 1.0 / tn, t);
        }
      }
      if (norm(active_dir) > 1e-300) {
        candidates.push_back(walk(best, active_dir, h));
        candidates.push_back(walk(best, active_dir, 0.5 * h));
      }
      // geodesic midpoint of the two farthest points: the exact minimizer
      // of their pairwise max, and the escape from the minimax valley that
      // axis steps crawl along
      {
        std::size_t i1 = tail_start, i2 = tail_start;
        double a1 = -1.0, a2 = -1.0;
        for (std::size_t n = tail_start; n < points.size(); ++n) {
          const double a = unit_angle(best, points[n].coords);
          if (a > a1) {
            a1 = a;
            i1 = n;
          }
        }
        for (std::size_t n = tail_start; n < points.size(); ++n) {
          if (unit_angle(points[n].coords, points[i1].coords) <= 1e-12) continue;
          const double a = unit_angle(best, points[n].coords);
          if (a > a2) {
            a2 = a;
            i2 = n;
          }
        }
        if (a2 < 0.0) i2 = i1;  // all tail points coincide
        const double pair_angle = unit_angle(points[i1].coords, points[i2].coords);
        Vec mid = points[i1].coords;
        if (pair_angle > 1e-15) {
          const double s = std::sin(pair_angle);
          mid = normalized(axpy(scaled(points[i1].coords, std::sin(0.5 * pair_angle) / s),
                                std::sin(0.5 * pair_angle) / s, points[i2].coords));
        }
        candidates.push_back(mid);
        candidates.push_back(walk(best, sub(mid, best), h));
      }
      for (const auto& cand : candidates) {
        if (unit_angle(cand, space.cap_center.coords) > space.cap_radius + 1e-12) continue;
        const double value = objective(cand);
        if (value < best_value) {
          best_value = value;
          best = cand;
          improved = true;
        }
      }
    }
    h *= 0.5;
  }
  return AsymptoticCenterResult{SpherePoint{best}, best_value * inv_sqrt_kappa};
}

FejerClosureReport check_fejer_closure_properties(const IterationTrace& trace,
                                                  const std::vector<SpherePoint>& witnesses) {
  require_witnesses(trace, witnesses);
  const auto& di = require_intersection_distances(trace);

  FejerClosureReport report;
  report.cauchy_min_slack = std::numeric_limits<double>::infinity();
  report.set_distance_monotone_min_slack = std::numeric_limits<double>::infinity();

  for (std::size_t n = 0; n + 1 < di.size(); ++n)
    report.set_distance_monotone_min_slack =
        std::min(report.set_distance_monotone_min_slack, di[n] - di[n + 1]);

  const std::size_t len = trace.iterates.size();
  const std::size_t n_stride = std::max<std::size_t>(1, len / 64);
  const std::size_t k_stride = std::max<std::size_t>(1, len / 16);
  for (std::size_t n = 0; n < len; n += n_stride) {
    for (std::size_t k = 1; n + k < len; k += k_stride) {
      const double lhs = distance(trace.space, trace.iterates[n + k], trace.iterates[n]);
      report.cauchy_min_slack = std::min(report.cauchy_min_slack, 2.0 * di[n] - lhs);
      ++report.sampled_pairs;
    }
  }
  return report;
}

DiagnosticsResult run_diagnostics(const ModelSpace& space, const ConvexSet& a, const ConvexSet& b,
                                  const SpherePoint& x0,
                                  const std::vector<SpherePoint>& witnesses,
                                  const SolverConfig& cfg, const DiagnosticsOptions& opts) {
  DiagnosticsResult result;
  DiagnosticsReport& report = result.report;
  report.estimated_c_m = space.c_m;

  // Convexity resample: catches an over-claimed c_m before anything else.
  // The estimate is an empirical infimum and carries sampling noise, so the
  // check fires on a margin in constant units, not on raw slack.
  {
    constexpr double kResampleMargin = 0.05;
    DeterministicRng rng(opts.seed ^ 0xC0117E57u);
    double min_slack = std::numeric_limits<double>::infinity();
    double min_c = std::numeric_limits<double>::infinity();
    for (int i = 0; i < opts.convexity_resamples; ++i) {
      const SpherePoint x = sample_cap_point(space, rng);
      const SpherePoint y = sample_cap_point(space, rng);
      const SpherePoint z = sample_cap_point(space, rng);
      const double t = rng.next_double();
      const double slack = check_convexity_inequality(space, x, y, z, t);
      min_slack = std::min(min_slack, slack);
      const double dxy = distance(space, x, y);
      const double denom = t * (1.0 - t) * dxy * dxy;
      if (denom > 1e-12) min_c = std::min(min_c, slack / denom + space.c_m);
    }
    report.convexity_resample_min_slack = min_slack;
    if (min_c < space.c_m - kResampleMargin)
      throw CheckFailure("convexity-inequality",
                         "resampled convexity constant " + std::to_string(min_c) +
                             " undercuts the configured c_m " + std::to_string(space.c_m));
  }

  SolverConfig run_cfg = cfg;
  run_cfg.record_set_distances = true;
  result.trace = alternate(space, a, b, x0, run_cfg);
  const IterationTrace& trace = result.trace;

  report.fejer_min_slack = check_fejer(trace, witnesses);
  if (report.fejer_min_slack < -kExactTol)
    throw CheckFailure("fejer-monotonicity",
                       "min slack " + std::to_string(report.fejer_min_slack));

  report.projection_ineq_min_slack = check_trace_projection_inequality(trace, witnesses);
  if (report.projection_ineq_min_slack < -kExactTol)
    throw CheckFailure("projection-inequality",
                       "min slack " + std::to_string(report.projection_ineq_min_slack));

  report.asymptotic_regularity = check_asymptotic_regularity(trace, opts.epsilon);

  report.max_ineq_min_slack = check_max_inequality(trace);
  if (report.max_ineq_min_slack < -kOracleBudget)
    throw CheckFailure("max-inequality",
                       "min slack " + std::to_string(report.max_ineq_min_slack));

  const RegularityEstimate reg =
      estimate_regularity_k(space, a, b, opts.regularity_samples, opts.seed, cfg.oracle_grid);
  report.regularity_constant_k = reg.k_hat;
  const LinearRateReport rate = check_linear_rate(trace, reg.k_hat);
  report.observed_linear_rate = rate.observed;
  report.theoretical_linear_rate = rate.theoretical;

  const FejerClosureReport closure = check_fejer_closure_properties(trace, witnesses);
  report.fejer_cauchy_min_slack = closure.cauchy_min_slack;
  report.set_distance_monotone_min_slack = closure.set_distance_monotone_min_slack;
  if (closure.cauchy_min_slack < -kOracleBudget)
    throw CheckFailure("fejer-cauchy-bound",
                       "min slack " + std::to_string(closure.cauchy_min_slack));
  if (closure.set_distance_monotone_min_slack < -kOracleBudget)
    throw CheckFailure("set-distance-monotonicity",
                       "min slack " + std::to_string(closure.set_distance_monotone_min_slack));

  const std::size_t len = trace.iterates.size();
  const std::size_t tail = len - std::min(len, std::max<std::size_t>(8, len / 4));
  const AsymptoticCenterResult center =
      asymptotic_center(space, trace.iterates, tail, std::max(32, cfg.oracle_grid / 4));
  report.asymptotic_center = center.center;

  if (trace.stop_reason == StopReason::StepTolerance)
    report.limit_point = trace.iterates.back();
  return result;
}

}  // namespace catfeas
