#include "catfeas/convex_sets.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace catfeas {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTinyAngle = 1e-14;

ColMatrix generator_matrix(const SphericalHull& hull) {
  ColMatrix g;
  g.columns.reserve(hull.generators.size());
  for (const auto& p : hull.generators) g.columns.push_back(p.coords);
  return g;
}

// Orthonormal tangent frame at a unit vector c (Gram-Schmidt over the
// coordinate axes); returns dim = len(c)-1 vectors.
std::vector<Vec> tangent_basis(const Vec& c) {
  std::vector<Vec> basis;
  const std::size_t m = c.size();
  for (std::size_t axis = 0; axis < m && basis.size() + 1 < m; ++axis) {
    Vec v(m, 0.0);
    v[axis] = 1.0;
    v = axpy(v, -dot(v, c), c);
    for (const auto& b : basis) v = axpy(v, -dot(v, b), b);
    const double n = norm(v);
    if (n > 1e-8) basis.push_back(scaled(v, 1.0 / n));
  }
  return basis;
}

Vec tangent_normalized(const Vec& candidate, const Vec& center) {
  Vec v = axpy(candidate, -dot(candidate, center), center);
  const double n = norm(v);
  if (n < 1e-300) return candidate;
  return scaled(v, 1.0 / n);
}

void for_each_composition(int total, int parts, std::vector<int>& current,
                          const std::function<void(const std::vector<int>&)>& fn) {
  if (parts == 1) {
    current.push_back(total);
    fn(current);
    current.pop_back();
    return;
  }
  for (int head = 0; head <= total; ++head) {
    current.push_back(head);
    for_each_composition(total - head, parts - 1, current, fn);
    current.pop_back();
  }
}

double compositions_count(int total, int parts) {
  double c = 1.0;
  for (int i = 1; i < parts; ++i) c = c * (total + i) / i;
  return c;
}

// Uniform sweep/refinement parameterization of one convex set.
//   ball:    param = {r, u_0..u_n}  point = cos(r) c + sin(r) u
//   segment: param = {t}
//   hull:    param = {lambda_0..lambda_{k-1}} on the simplex
struct ParamSpace {
  std::function<SpherePoint(const std::vector<double>&)> point_of;
  std::function<void(const std::function<void(const std::vector<double>&)>&)> for_each_coarse;
  // neighbors of `param` at refinement scale `factor` (1, 1/2, 1/4, ...)
  std::function<void(const std::vector<double>&, double,
                     const std::function<void(const std::vector<double>&)>&)>
      for_each_neighbor;
};

ParamSpace make_param_space(const ModelSpace& space, const ConvexSet& set, int grid) {
  ParamSpace ps;
  if (const auto* ball = std::get_if<GeodesicBall>(&set)) {
    const Vec center = ball->center.coords;
    const double r_max = ball->radius * std::sqrt(space.kappa);  // unit-sphere angle
    const auto basis = tangent_basis(center);
    const double r_cell = std::max(r_max, 1e-12) / grid;
    const double dir_cell = 2.0 * kPi / grid;

    ps.point_of = [center](const std::vector<double>& p) {
      const double r = p[0];
      Vec u(p.begin() + 1, p.end());
      Vec point = axpy(scaled(center, std::cos(r)), std::sin(r), u);
      return SpherePoint{normalized(point)};
    };
    ps.for_each_coarse = [=](const std::function<void(const std::vector<double>&)>& fn) {
      std::vector<double> param(1 + center.size(), 0.0);
      // center itself once
      param[0] = 0.0;
      for (std::size_t i = 0; i < basis[0].size(); ++i) param[1 + i] = basis[0][i];
      fn(param);
      std::vector<Vec> dirs;
      if (basis.size() == 2) {
        for (int j = 0; j < grid; ++j) {
          const double theta = 2.0 * kPi * j / grid;
          dirs.push_back(axpy(scaled(basis[0], std::cos(theta)), std::sin(theta), basis[1]));
        }
      } else {
        DeterministicRng rng(0xD12EC7u ^ static_cast<std::uint64_t>(grid));
        for (int j = 0; j < grid; ++j) {
          Vec u(center.size(), 0.0);
          for (double& v : u) v = rng.next_gaussian();
          u = tangent_normalized(u, center);
          dirs.push_back(u);
        }
      }
      for (const auto& u : dirs) {
        for (int i = 1; i <= grid; ++i) {
          param[0] = r_max * i / grid;
          for (std::size_t m = 0; m < u.size(); ++m) param[1 + m] = u[m];
          fn(param);
        }
      }
    };
    ps.for_each_neighbor = [=](const std::vector<double>& p, double factor,
                               const std::function<void(const std::vector<double>&)>& fn) {
      const double hr = r_cell * factor;
      const double hd = dir_cell * factor;
      Vec u(p.begin() + 1, p.end());
      std::vector<Vec> dirs{u};
      for (const auto& b : basis) {
        Vec w = axpy(b, -dot(b, u), u);  // component of b transverse to u
        if (norm(w) < 1e-12) continue;
        w = normalized(w);
        dirs.push_back(tangent_normalized(axpy(u, hd, w), center));
        dirs.push_back(tangent_normalized(axpy(u, -hd, w), center));
      }
      for (const auto& d : dirs) {
        for (int dr = -1; dr <= 1; ++dr) {
          const double r = std::clamp(p[0] + dr * hr, 0.0, r_max);
          std::vector<double> q(1 + d.size());
          q[0] = r;
          for (std::size_t m = 0; m < d.size(); ++m) q[1 + m] = d[m];
          fn(q);
        }
      }
    };
    return ps;
  }

  if (const auto* seg = std::get_if<GeodesicSegment>(&set)) {
    const Geodesic g = make_geodesic(space, seg->a, seg->b);
    const double cell = 1.0 / grid;
    ps.point_of = [g](const std::vector<double>& p) { return geodesic_eval(g, p[0]); };
    ps.for_each_coarse = [=](const std::function<void(const std::vector<double>&)>& fn) {
      std::vector<double> param(1);
      for (int i = 0; i <= grid; ++i) {
        param[0] = static_cast<double>(i) / grid;
        fn(param);
      }
    };
    ps.for_each_neighbor = [=](const std::vector<double>& p, double factor,
                               const std::function<void(const std::vector<double>&)>& fn) {
      const double h = cell * factor;
      for (int dt = -2; dt <= 2; ++dt) {
        if (dt == 0) continue;
        std::vector<double> q{std::clamp(p[0] + 0.5 * h * dt, 0.0, 1.0)};
        fn(q);
      }
    };
    return ps;
  }

  const auto& hull = std::get<SphericalHull>(set);
  const int k = static_cast<int>(hull.generators.size());
  if (k == 0) throw Error("empty-generator-list", "spherical hull has no generators");
  if (compositions_count(grid, k) > 5e6)
    throw Error("parameter-out-of-range",
                "oracle grid too fine for " + std::to_string(k) + " hull generators");
  const ColMatrix g = generator_matrix(hull);
  const double cell = 1.0 / grid;
  ps.point_of = [g](const std::vector<double>& lambda) {
    return SpherePoint{normalized(g.apply(lambda))};
  };
  ps.for_each_coarse = [=](const std::function<void(const std::vector<double>&)>& fn) {
    std::vector<int> current;
    std::vector<double> lambda(k);
    for_each_composition(grid, k, current, [&](const std::vector<int>& c) {
      for (int i = 0; i < k; ++i) lambda[static_cast<std::size_t>(i)] = static_cast<double>(c[i]) / grid;
      fn(lambda);
    });
  };
  ps.for_each_neighbor = [=](const std::vector<double>& p, double factor,
                             const std::function<void(const std::vector<double>&)>& fn) {
    const double h = cell * factor;
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        if (i == j) continue;
        std::vector<double> q = p;
        const double step = std::min(h, q[static_cast<std::size_t>(j)]);
        if (step <= 0.0) continue;
        q[static_cast<std::size_t>(i)] += step;
        q[static_cast<std::size_t>(j)] -= step;
        fn(q);
      }
    }
  };
  return ps;
}

// Shared sweep: coarse pass then 20 cell-halving passes around the incumbent.
// `accept` may reject candidates (used by intersection sweeps); the point
// and its parameter of the best accepted candidate are returned.
struct SweepResult {
  bool found = false;
  SpherePoint point;
  std::vector<double> param;
  double objective = std::numeric_limits<double>::infinity();
};

SweepResult sweep_minimize(const ParamSpace& ps,
                           const std::function<double(const SpherePoint&)>& objective,
                           const std::function<bool(const SpherePoint&)>& accept,
                           int passes = 20) {
  SweepResult best;
  ps.for_each_coarse([&](const std::vector<double>& param) {
    const SpherePoint p = ps.point_of(param);
    if (accept && !accept(p)) return;
    const double value = objective(p);
    if (value < best.objective) {
      best.objective = value;
      best.param = param;
      best.point = p;
      best.found = true;
    }
  });
  if (!best.found) return best;

  double factor = 1.0;
  for (int pass = 0; pass < passes; ++pass) {
    bool improved = true;
    // bounded so that ulp-sized improvements cannot stall a pass
    for (int inner = 0; improved && inner < 200; ++inner) {
      improved = false;
      ps.for_each_neighbor(best.param, factor, [&](const std::vector<double>& param) {
        const SpherePoint p = ps.point_of(param);
        if (accept && !accept(p)) return;
        const double value = objective(p);
        if (value < best.objective) {
          best.objective = value;
          best.param = param;
          best.point = p;
          improved = true;
        }
      });
    }
    factor *= 0.5;
  }
  return best;
}

}  // namespace

SpherePoint sweep_minimize_over_set(const ModelSpace& space, const ConvexSet& set, int grid,
                                    const std::function<double(const SpherePoint&)>& objective,
                                    int passes) {
  if (grid < 2) throw Error("parameter-out-of-range", "sweep grid must be >= 2");
  validate_set(space, set);
  const ParamSpace ps = make_param_space(space, set, grid);
  const auto result = sweep_minimize(ps, objective, nullptr, passes);
  return result.point;
}

void validate_set(const ModelSpace& space, const ConvexSet& set) {
  if (const auto* ball = std::get_if<GeodesicBall>(&set)) {
    require_in_cap(space, ball->center);
    if (ball->radius < 0.0) throw Error("parameter-out-of-range", "ball radius must be >= 0");
    const double center_angle = unit_angle(ball->center.coords, space.cap_center.coords);
    if (center_angle + ball->radius * std::sqrt(space.kappa) > space.cap_radius + 1e-12)
      throw Error("set-outside-cap", "geodesic ball is not contained in the ambient cap");
    return;
  }
  if (const auto* seg = std::get_if<GeodesicSegment>(&set)) {
    require_in_cap(space, seg->a);
    require_in_cap(space, seg->b);
    return;
  }
  const auto& hull = std::get<SphericalHull>(set);
  if (hull.generators.empty())
    throw Error("empty-generator-list", "spherical hull has no generators");
  for (const auto& p : hull.generators) require_in_cap(space, p);
}

bool contains(const ModelSpace& space, const ConvexSet& set, const SpherePoint& x, double tol) {
  require_in_cap(space, x);
  if (tol < 0.0) throw Error("parameter-out-of-range", "tolerance must be >= 0");
  if (const auto* ball = std::get_if<GeodesicBall>(&set)) {
    return distance(space, x, ball->center) <= ball->radius + tol;
  }
  if (std::get_if<GeodesicSegment>(&set) != nullptr) {
    const SpherePoint p = project(space, set, x);
    return distance(space, x, p) <= tol;
  }
  const auto& hull = std::get<SphericalHull>(set);
  if (hull.generators.empty())
    throw Error("empty-generator-list", "spherical hull has no generators");
  const ColMatrix g = generator_matrix(hull);
  const std::size_t k = g.cols();

  if (k <= x.coords.size()) {
    if (auto lambda = least_squares(g, x.coords)) {
      const double residual = norm(sub(g.apply(*lambda), x.coords));
      if (residual > std::max(tol, 1e-10)) return false;
      double min_coeff = std::numeric_limits<double>::infinity();
      for (double v : *lambda) min_coeff = std::min(min_coeff, v);
      return min_coeff >= -tol;
    }
  }
  // rank deficient or overcomplete generator family
  const std::vector<double> lambda = nonnegative_least_squares(g, x.coords);
  const Vec v = g.apply(lambda);
  if (norm(v) < 1e-12) return false;
  return unit_angle(normalized(v), x.coords) <= std::max(tol, 1e-12);
}

SpherePoint project(const ModelSpace& space, const ConvexSet& set, const SpherePoint& x) {
  require_in_cap(space, x);

  if (const auto* ball = std::get_if<GeodesicBall>(&set)) {
    const double d = distance(space, x, ball->center);
    if (d <= ball->radius) return x;
    const Geodesic g = make_geodesic(space, ball->center, x);
    return geodesic_eval(g, ball->radius / d);
  }

  if (const auto* seg = std::get_if<GeodesicSegment>(&set)) {
    const Geodesic g = make_geodesic(space, seg->a, seg->b);
    if (g.angle < kTinyAngle) return seg->a;
    const auto objective = [&](double t) { return unit_angle(x.coords, geodesic_eval(g, t).coords); };
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-12) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (objective(m1) < objective(m2))
        hi = m2;
      else
        lo = m1;
    }
    // snap to the endpoints when they tie or win; boundary minima are flat
    // to machine precision and the ternary interval drifts there
    double best_t = 0.5 * (lo + hi);
    double best_v = objective(best_t);
    for (double t : {0.0, 1.0}) {
      const double v = objective(t);
      if (v <= best_v) {
        best_v = v;
        best_t = t;
      }
    }
    return geodesic_eval(g, best_t);
  }

  const auto& hull = std::get<SphericalHull>(set);
  if (hull.generators.empty())
    throw Error("empty-generator-list", "spherical hull has no generators");
  if (contains(space, set, x, 1e-12)) return x;

  const ColMatrix g = generator_matrix(hull);
  const std::size_t k = g.cols();

  // The nearest point of the spherical hull is the normalized Euclidean
  // projection of x onto the cone spanned by the generators.
  if (k <= 12) {
    // face-by-face: the optimal active set appears among the subsets
    Vec best_v;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
      ColMatrix face;
      for (std::size_t j = 0; j < k; ++j)
        if (mask & (1u << j)) face.columns.push_back(g.columns[j]);
      auto lambda = least_squares(face, x.coords);
      if (!lambda) continue;
      bool feasible = true;
      for (double v : *lambda)
        if (v < -1e-12) feasible = false;
      if (!feasible) continue;
      Vec v = face.apply(*lambda);
      const double len = norm(v);
      if (len < 1e-12) continue;
      const double score = dot(x.coords, v) / len;
      if (score > best_score) {
        best_score = score;
        best_v = std::move(v);
      }
    }
    if (best_v.empty()) throw Error("degenerate-hull", "no feasible face projection found");
    return SpherePoint{normalized(best_v)};
  }

  const std::vector<double> lambda = nonnegative_least_squares(g, x.coords);
  Vec v = g.apply(lambda);
  if (norm(v) < 1e-12) throw Error("degenerate-hull", "cone projection collapsed to zero");
  return SpherePoint{normalized(v)};
}

SpherePoint oracle_project(const ModelSpace& space, const ConvexSet& set, const SpherePoint& x,
                           int grid) {
  if (grid < 2) throw Error("parameter-out-of-range", "oracle grid must be >= 2");
  require_in_cap(space, x);
  validate_set(space, set);
  const ParamSpace ps = make_param_space(space, set, grid);
  const auto result = sweep_minimize(
      ps, [&](const SpherePoint& p) { return unit_angle(x.coords, p.coords); }, nullptr);
  return result.point;
}

namespace {

double projection_inequality_slack(const ModelSpace& space, const ConvexSet& set,
                                   const SpherePoint& x, const SpherePoint& z) {
  const SpherePoint p = project(space, set, x);
  const double dxz = distance(space, x, z);
  const double dzp = distance(space, z, p);
  const double dxp = distance(space, x, p);
  return dxz * dxz - dzp * dzp - space.c_m * dxp * dxp;
}

}  // namespace

double check_projection_inequality(const ModelSpace& space, const ConvexSet& set,
                                   const SpherePoint& x, const SpherePoint& z) {
  if (!contains(space, set, z, 1e-9))
    throw Error("z-not-in-set", "projection inequality requires z in the set");
  return projection_inequality_slack(space, set, x, z);
}

double check_p1_property(const ModelSpace& space, const ConvexSet& set, const SpherePoint& x,
                         const SpherePoint& u) {
  if (!contains(space, set, u, 1e-9))
    throw Error("u-not-in-set", "property (P1) requires u in Fix(P_C) = C");
  return projection_inequality_slack(space, set, x, u);
}

double distance_to_set(const ModelSpace& space, const ConvexSet& set, const SpherePoint& x) {
  return distance(space, x, project(space, set, x));
}

IntersectionSampler::IntersectionSampler(const ModelSpace& space, ConvexSet a, ConvexSet b,
                                         int grid)
    : space_(space), a_(std::move(a)), b_(std::move(b)), grid_(grid) {
  if (grid < 2) throw Error("parameter-out-of-range", "oracle grid must be >= 2");
  validate_set(space_, a_);
  validate_set(space_, b_);

  const ConvexSet* sets[2] = {&a_, &b_};
  auto run_sweep = [&](double member_tol) {
    feasible_.clear();
    params_.clear();
    for (int host = 0; host < 2; ++host) {
      const ConvexSet& other = *sets[1 - host];
      const ParamSpace ps = make_param_space(space_, *sets[host], grid_);
      ps.for_each_coarse([&](const std::vector<double>& param) {
        const SpherePoint p = ps.point_of(param);
        if (!contains(space_, other, p, member_tol)) return;
        feasible_.push_back(p);
        params_.push_back({host, param});
      });
    }
  };

  run_sweep(member_tol_);
  if (!feasible_.empty()) return;

  // Relaxed pass for thin or tangential intersections: chase the best
  // near-feasible candidates toward the other set and accept anything that
  // refines to within 1e-6 of it.
  member_tol_ = 1e-6;
  for (int host = 0; host < 2; ++host) {
    const ConvexSet& other = *sets[1 - host];
    const ParamSpace ps = make_param_space(space_, *sets[host], grid_);
    const auto best = sweep_minimize(
        ps, [&](const SpherePoint& p) { return distance_to_set(space_, other, p); }, nullptr);
    if (best.found && best.objective <= member_tol_) {
      feasible_.push_back(best.point);
      params_.push_back({host, best.param});
    }
  }
  if (feasible_.empty())
    throw Error("empty-intersection-detected",
                "no sample of either set lies in the other within 1e-6 after refinement");
}

double IntersectionSampler::distance_from(const SpherePoint& x) const {
  require_in_cap(space_, x);
  if (contains(space_, a_, x, 1e-9) && contains(space_, b_, x, 1e-9)) return 0.0;

  std::size_t best_idx = 0;
  double best_angle = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < feasible_.size(); ++i) {
    const double angle = unit_angle(x.coords, feasible_[i].coords);
    if (angle < best_angle) {
      best_angle = angle;
      best_idx = i;
    }
  }

  // refine within the host set's parameters, keeping membership in the other
  const ParamSample& seed = params_[best_idx];
  const ConvexSet& host = (seed.host == 0) ? a_ : b_;
  const ConvexSet& other = (seed.host == 0) ? b_ : a_;
  const ParamSpace ps = make_param_space(space_, host, grid_);
  const double tol = member_tol_;

  std::vector<double> param = seed.param;
  double best = best_angle;
  double factor = 1.0;
  for (int pass = 0; pass < 20; ++pass) {
    bool improved = true;
    for (int inner = 0; improved && inner < 200; ++inner) {
      improved = false;
      ps.for_each_neighbor(param, factor, [&](const std::vector<double>& q) {
        const SpherePoint p = ps.point_of(q);
        if (!contains(space_, other, p, tol)) return;
        const double angle = unit_angle(x.coords, p.coords);
        if (angle < best) {
          best = angle;
          param = q;
          improved = true;
        }
      });
    }
    factor *= 0.5;
  }
  return best / std::sqrt(space_.kappa);
}

double distance_to_intersection(const ModelSpace& space, const ConvexSet& a, const ConvexSet& b,
                                const SpherePoint& x, int grid) {
  IntersectionSampler sampler(space, a, b, grid);
  return sampler.distance_from(x);
}

}  // namespace catfeas
