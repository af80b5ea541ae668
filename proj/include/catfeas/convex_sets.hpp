#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "catfeas/model_space.hpp"

namespace catfeas {

// Closed geodesic ball; radius in space-distance units.
struct GeodesicBall {
  SpherePoint center;
  double radius = 0.0;
};

// Image of the unique geodesic joining a and b.
struct GeodesicSegment {
  SpherePoint a;
  SpherePoint b;
};

// Closed spherical convex hull of finitely many generators: the central
// projection onto the sphere of the Euclidean convex hull (valid because
// the cap lies in an open hemisphere).
struct SphericalHull {
  std::vector<SpherePoint> generators;
};

using ConvexSet = std::variant<GeodesicBall, GeodesicSegment, SphericalHull>;

// Enforces the set invariants relative to the ambient cap. Throws
// Error("set-outside-cap"), Error("empty-generator-list"), ...
void validate_set(const ModelSpace& space, const ConvexSet& set);

// Membership at tolerance tol. Hulls use the exact cone test: x belongs to
// the hull iff G*lambda = x has a solution with lambda >= -tol (nonnegative
// least squares when the generators are rank deficient or k > n+1).
bool contains(const ModelSpace& space, const ConvexSet& set, const SpherePoint& x, double tol);

// Metric projection P_C(x): the unique nearest point of the set.
SpherePoint project(const ModelSpace& space, const ConvexSet& set, const SpherePoint& x);

// Brute-force projection oracle: dense parameter grid over the set followed
// by 20 cell-halving refinement passes around the incumbent. Independent of
// the analytic projection path; accuracy <= 1e-6 after refinement.
SpherePoint oracle_project(const ModelSpace& space, const ConvexSet& set, const SpherePoint& x,
                           int grid);

// d(x,z)^2 - d(z,P_C(x))^2 - c_m d(x,P_C(x))^2; nonnegative for a valid c_m.
// Requires z in the set (tol 1e-9); throws Error("z-not-in-set").
double check_projection_inequality(const ModelSpace& space, const ConvexSet& set,
                                   const SpherePoint& x, const SpherePoint& z);

// Property (P1) for T = P_C with exponent 2 and beta = c_m:
// d(x,u)^2 - beta d(P_C(x),x)^2 - d(P_C(x),u)^2 for u in Fix(P_C) = C.
// Algebraically identical to check_projection_inequality; kept as a named
// verifier. Throws Error("u-not-in-set").
double check_p1_property(const ModelSpace& space, const ConvexSet& set, const SpherePoint& x,
                         const SpherePoint& u);

// d(x, C) realized through the analytic projection.
double distance_to_set(const ModelSpace& space, const ConvexSet& set, const SpherePoint& x);

// Brute-force distance to A inter B: grid samples of each set filtered by
// membership in the other, better of both sweeps, then local refinement.
// Intersections are never represented symbolically. Throws
// Error("empty-intersection-detected") when no sample of either set lies in
// the other at tolerance 1e-6 after refinement.
double distance_to_intersection(const ModelSpace& space, const ConvexSet& a, const ConvexSet& b,
                                const SpherePoint& x, int grid);

// Minimizes an arbitrary objective over a set with the same machinery the
// oracle uses: coarse parameter grid plus `passes` cell-halving refinement
// rounds. Deterministic; ties break to the lowest grid index.
SpherePoint sweep_minimize_over_set(const ModelSpace& space, const ConvexSet& set, int grid,
                                    const std::function<double(const SpherePoint&)>& objective,
                                    int passes);

// Cached feasible-sample sweep for one (a, b, grid) triple, so that many
// intersection-distance queries (one per trace iterate) reuse one sweep.
class IntersectionSampler {
 public:
  IntersectionSampler(const ModelSpace& space, ConvexSet a, ConvexSet b, int grid);

  // Samples found in both sets. Membership tolerance 1e-9; when that finds
  // nothing the sweep retries at the relaxed 1e-6 budget with refinement.
  const std::vector<SpherePoint>& samples() const { return feasible_; }

  // min over feasible samples of d(x, .) plus refinement around the
  // incumbent; exact 0 when x itself lies in both sets at 1e-9.
  double distance_from(const SpherePoint& x) const;

 private:
  const ModelSpace space_;
  ConvexSet a_;
  ConvexSet b_;
  int grid_;
  double member_tol_ = 1e-9;
  std::vector<SpherePoint> feasible_;
  // refinement bookkeeping: host set and parameter of each feasible sample
  struct ParamSample {
    int host = 0;  // 0 = a, 1 = b
    std::vector<double> param;
  };
  std::vector<ParamSample> params_;
};

}  // namespace catfeas
