#include "catfeas/model_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace catfeas {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDegenerateAngle = 1e-14;
}  // namespace

SpherePoint make_sphere_point(Vec coords, double unit_tol) {
  if (coords.size() < 2) throw Error("dimension-mismatch", "point needs at least 2 coordinates");
  const double n = norm(coords);
  if (std::abs(n - 1.0) > unit_tol)
    throw Error("not-unit-vector",
                "norm " + std::to_string(n) + " deviates from 1 beyond tolerance");
  return SpherePoint{std::move(coords)};
}

double ModelSpace::diameter_limit() const { return kPi / std::sqrt(kappa); }

ModelSpace make_model_space(double kappa, int dim, SpherePoint cap_center, double cap_radius,
                            double c_m) {
  if (!(kappa > 0.0)) throw Error("parameter-out-of-range", "kappa must be positive");
  if (dim < 1) throw Error("parameter-out-of-range", "dim must be >= 1");
  if (cap_center.coords.size() != static_cast<std::size_t>(dim) + 1)
    throw Error("dimension-mismatch", "cap_center has wrong length for dim");
  if (!(cap_radius > 0.0 && cap_radius < kPi / 4.0))
    throw Error("invalid-cap", "cap_radius must lie in (0, pi/4)");
  if (!(c_m > 0.0 && c_m <= 1.0)) throw Error("parameter-out-of-range", "c_m must lie in (0,1]");
  ModelSpace space;
  space.kappa = kappa;
  space.dim = dim;
  space.cap_center = std::move(cap_center);
  space.cap_radius = cap_radius;
  space.c_m = c_m;
  return space;
}

bool in_cap(const ModelSpace& space, const SpherePoint& p, double tol) {
  if (p.coords.size() != space.cap_center.coords.size()) return false;
  return unit_angle(p.coords, space.cap_center.coords) <= space.cap_radius + tol;
}

void require_in_cap(const ModelSpace& space, const SpherePoint& p) {
  if (p.coords.size() != space.cap_center.coords.size())
    throw Error("dimension-mismatch", "point dimension does not match the space");
  const double angle = unit_angle(p.coords, space.cap_center.coords);
  if (angle > space.cap_radius + 1e-9)
    throw Error("point-outside-cap", "angle to cap center " + std::to_string(angle) +
                                         " exceeds cap radius " + std::to_string(space.cap_radius));
}

double distance(const ModelSpace& space, const SpherePoint& x, const SpherePoint& y) {
  require_in_cap(space, x);
  require_in_cap(space, y);
  return unit_angle(x.coords, y.coords) / std::sqrt(space.kappa);
}

Geodesic make_geodesic(const ModelSpace& space, const SpherePoint& a, const SpherePoint& b) {
  require_in_cap(space, a);
  require_in_cap(space, b);
  return Geodesic{a, b, unit_angle(a.coords, b.coords)};
}

SpherePoint geodesic_eval(const Geodesic& g, double t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw Error("parameter-out-of-range", "geodesic parameter t must lie in [0,1]");
  if (t == 0.0 || g.angle < kDegenerateAngle) return g.start;
  if (t == 1.0) return g.end;
  const double s = std::sin(g.angle);
  Vec p = axpy(scaled(g.start.coords, std::sin((1.0 - t) * g.angle) / s),
               std::sin(t * g.angle) / s, g.end.coords);
  return SpherePoint{normalized(p)};
}

ComparisonTriangle comparison_triangle(const ModelSpace& space, const TrianglePoints& tri) {
  for (const auto& v : tri) require_in_cap(space, v);
  const double t01 = unit_angle(tri[0].coords, tri[1].coords);
  const double t02 = unit_angle(tri[0].coords, tri[2].coords);
  const double t12 = unit_angle(tri[1].coords, tri[2].coords);

  ComparisonTriangle cmp;
  cmp.kappa = space.kappa;
  cmp.vertices[0] = {0.0, 0.0, 1.0};
  cmp.vertices[1] = {std::sin(t01), 0.0, std::cos(t01)};

  double phi = 0.0;
  const double denom = std::sin(t01) * std::sin(t02);
  if (denom > kDegenerateAngle) {
    const double cos_phi = (std::cos(t12) - std::cos(t01) * std::cos(t02)) / denom;
    phi = std::acos(std::clamp(cos_phi, -1.0, 1.0));
  }
  cmp.vertices[2] = {std::sin(t02) * std::cos(phi), std::sin(t02) * std::sin(phi), std::cos(t02)};
  return cmp;
}

namespace {

Vec slerp_unit(const Vec& a, const Vec& b, double t) {
  const double angle = unit_angle(a, b);
  if (angle < kDegenerateAngle) return a;
  if (t == 0.0) return a;
  if (t == 1.0) return b;
  const double s = std::sin(angle);
  return normalized(axpy(scaled(a, std::sin((1.0 - t) * angle) / s), std::sin(t * angle) / s, b));
}

}  // namespace

Vec comparison_point(const ModelSpace& space, const TrianglePoints& tri, int side, double s) {
  if (side < 0 || side > 2) throw Error("parameter-out-of-range", "side must be 0, 1 or 2");
  if (!(s >= 0.0 && s <= 1.0))
    throw Error("parameter-out-of-range", "arc fraction s must lie in [0,1]");
  const ComparisonTriangle cmp = comparison_triangle(space, tri);
  const Vec& u = cmp.vertices[static_cast<std::size_t>(side)];
  const Vec& v = cmp.vertices[static_cast<std::size_t>((side + 1) % 3)];
  if (unit_angle(u, v) < kDegenerateAngle && s != 0.0 && s != 1.0)
    throw Error("degenerate-side", "requested side has zero length; only s in {0,1} is defined");
  return slerp_unit(u, v, s);
}

double comparison_distance(const ModelSpace& space, const Vec& p, const Vec& q) {
  return unit_angle(p, q) / std::sqrt(space.kappa);
}

CatInequalityReport check_cat_inequality(const ModelSpace& space, const TrianglePoints& tri,
                                         int per_side_samples) {
  if (per_side_samples < 2) throw Error("parameter-out-of-range", "need at least 2 samples per side");
  const ComparisonTriangle cmp = comparison_triangle(space, tri);
  const double inv_sqrt_kappa = 1.0 / std::sqrt(space.kappa);

  struct SidePoint {
    Vec original;
    Vec comparison;
  };
  std::vector<SidePoint> samples;
  for (int side = 0; side < 3; ++side) {
    const auto& a = tri[static_cast<std::size_t>(side)];
    const auto& b = tri[static_cast<std::size_t>((side + 1) % 3)];
    const Vec& ca = cmp.vertices[static_cast<std::size_t>(side)];
    const Vec& cb = cmp.vertices[static_cast<std::size_t>((side + 1) % 3)];
    const bool degenerate = unit_angle(a.coords, b.coords) < kDegenerateAngle;
    const int count = degenerate ? 1 : per_side_samples;
    for (int i = 0; i < count; ++i) {
      const double s = (count == 1) ? 0.0 : static_cast<double>(i) / (count - 1);
      samples.push_back({slerp_unit(a.coords, b.coords, s), slerp_unit(ca, cb, s)});
    }
  }

  CatInequalityReport report;
  report.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i; j < samples.size(); ++j) {
      const double d = unit_angle(samples[i].original, samples[j].original) * inv_sqrt_kappa;
      const double rho = unit_angle(samples[i].comparison, samples[j].comparison) * inv_sqrt_kappa;
      report.min_margin = std::min(report.min_margin, rho - d);
      ++report.sample_pairs;
    }
  }
  return report;
}

double check_convexity_inequality(const ModelSpace& space, const SpherePoint& x,
                                  const SpherePoint& y, const SpherePoint& z, double t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw Error("parameter-out-of-range", "convexity parameter t must lie in [0,1]");
  const Geodesic g = make_geodesic(space, x, y);
  require_in_cap(space, z);
  const SpherePoint gt = geodesic_eval(g, t);
  const double dzx = distance(space, z, x);
  const double dzy = distance(space, z, y);
  const double dxy = distance(space, x, y);
  const double dzg = distance(space, z, gt);
  const double rhs = (1.0 - t) * dzx * dzx + t * dzy * dzy - space.c_m * t * (1.0 - t) * dxy * dxy;
  return rhs - dzg * dzg;
}

}  // namespace catfeas
