#pragma once

#include <array>

#include "catfeas/errors.hpp"
#include "catfeas/vecmath.hpp"

namespace catfeas {

// A point of the model space: a unit vector in R^(n+1). One representation
// serves every curvature; kappa enters the metric only through the
// 1/sqrt(kappa) distance rescale.
struct SpherePoint {
  Vec coords;
};

// Validating constructor; rejects vectors whose norm strays from 1.
SpherePoint make_sphere_point(Vec coords, double unit_tol = 1e-12);

// The ambient space: the sphere of curvature kappa restricted to a closed
// cap. cap_radius is in unit-sphere radians and must stay below pi/4, which
// forces diam(M) < D_kappa / 2 for every kappa.
struct ModelSpace {
  double kappa = 1.0;
  int dim = 2;  // points live in R^(dim+1)
  SpherePoint cap_center;
  double cap_radius = 0.0;
  double c_m = 1.0;  // convexity constant; user-supplied or estimated

  // D_kappa = pi / sqrt(kappa)
  double diameter_limit() const;
};

ModelSpace make_model_space(double kappa, int dim, SpherePoint cap_center,
                            double cap_radius, double c_m = 1.0);

bool in_cap(const ModelSpace& space, const SpherePoint& p, double tol = 1e-9);
// Throws Error("point-outside-cap") / Error("dimension-mismatch").
void require_in_cap(const ModelSpace& space, const SpherePoint& p);

// Geodesic distance arccos(<x,y>) / sqrt(kappa), in space units.
double distance(const ModelSpace& space, const SpherePoint& x, const SpherePoint& y);

// Constant-speed geodesic between two cap points, realized as a slerp.
struct Geodesic {
  SpherePoint start;
  SpherePoint end;
  double angle = 0.0;  // unit-sphere angle between the endpoints, in [0, pi)
};

Geodesic make_geodesic(const ModelSpace& space, const SpherePoint& a, const SpherePoint& b);

// gamma(t) for t in [0,1]; throws Error("parameter-out-of-range") otherwise.
SpherePoint geodesic_eval(const Geodesic& g, double t);

using TrianglePoints = std::array<SpherePoint, 3>;

// Comparison triangle in M_kappa^2, fixed gauge: vertex 0 at the pole,
// vertex 1 on the x >= 0 meridian, vertex 2 with y >= 0.
struct ComparisonTriangle {
  std::array<Vec, 3> vertices;  // unit vectors in R^3
  double kappa = 1.0;
};

ComparisonTriangle comparison_triangle(const ModelSpace& space, const TrianglePoints& tri);

// Point on comparison side `side` (joining vertex side and vertex
// (side+1)%3) at arc-length fraction s. Throws Error("degenerate-side")
// when the side has zero length and s is strictly interior.
Vec comparison_point(const ModelSpace& space, const TrianglePoints& tri, int side, double s);

// Distance between two points of the comparison plane M_kappa^2.
double comparison_distance(const ModelSpace& space, const Vec& p, const Vec& q);

struct CatInequalityReport {
  double min_margin = 0.0;  // min over sampled pairs of rho(pbar,qbar) - d(p,q)
  int sample_pairs = 0;
};

// Samples point pairs on the triangle's sides and compares original
// distances against comparison distances. Margins stay >= -1e-10 here
// because the model space itself attains the comparison bound.
CatInequalityReport check_cat_inequality(const ModelSpace& space, const TrianglePoints& tri,
                                         int per_side_samples);

// RHS - LHS of
//   d(z,gamma(t))^2 <= (1-t) d(z,x)^2 + t d(z,y)^2 - c_m t(1-t) d(x,y)^2
// along the geodesic gamma from x to y. Nonnegative whenever space.c_m is a
// valid convexity constant for the cap.
double check_convexity_inequality(const ModelSpace& space, const SpherePoint& x,
                                  const SpherePoint& y, const SpherePoint& z, double t);

}  // namespace catfeas
