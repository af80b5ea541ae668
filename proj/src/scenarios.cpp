#include "catfeas/scenarios.hpp"

#include <cmath>

namespace catfeas {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::array<std::complex<double>, 4> Su2Element::entries() const {
  const std::complex<double> a(x, 0.0);
  const std::complex<double> b(y, z);
  return {a, -std::conj(b), b, std::conj(a)};
}

Su2Element phi_embed(double x, double y, double z) {
  const double norm_sq = x * x + y * y + z * z;
  if (std::abs(norm_sq - 1.0) > 1e-9)
    throw Error("not-unit-vector", "phi_embed requires a unit vector");
  return Su2Element{x, y, z};
}

SpherePoint phi_extract(const Su2Element& m) {
  const double norm_sq = m.x * m.x + m.y * m.y + m.z * m.z;
  if (std::abs(norm_sq - 1.0) > 1e-12)
    throw Error("invariant-violation", "SU(2) element violates the determinant-1 invariant");
  return SpherePoint{{m.x, m.y, m.z}};
}

std::vector<Su2Element> embed_trace(const std::vector<SpherePoint>& iterates) {
  std::vector<Su2Element> out;
  out.reserve(iterates.size());
  for (const auto& p : iterates) out.push_back(phi_embed(p.coords[0], p.coords[1], p.coords[2]));
  return out;
}

ScenarioSpec paper_example() {
  const double s3 = std::sqrt(3.0) / 2.0;
  const double s8 = 2.0 * std::sqrt(2.0) / 3.0;
  const std::vector<Vec> gen_a = {{0.0, 0.0, 1.0}, {0.5, 0.0, s3}, {0.0, 0.5, s3}};
  const std::vector<Vec> gen_b = {{1.0 / 3.0, 0.0, s8},
                                  {2.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0},
                                  {2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0}};

  Vec mean(3, 0.0);
  for (const auto& g : gen_a) mean = add(mean, g);
  for (const auto& g : gen_b) mean = add(mean, g);
  const SpherePoint center{normalized(mean)};

  double max_angle = 0.0;
  for (const auto& g : gen_a) max_angle = std::max(max_angle, unit_angle(g, center.coords));
  for (const auto& g : gen_b) max_angle = std::max(max_angle, unit_angle(g, center.coords));
  const double cap_radius = max_angle + 0.05;
  if (cap_radius >= kPi / 4.0)
    throw Error("invalid-cap", "generator cap with margin 0.05 does not fit below pi/4");

  ModelSpace space = make_model_space(1.0, 2, center, cap_radius);
  space.c_m = estimate_c_m(space, kDefaultCmSamples, kDefaultCmSeed);

  ScenarioSpec spec;
  spec.name = "paper-su2";
  spec.space = space;
  SphericalHull hull_a, hull_b;
  for (const auto& g : gen_a) hull_a.generators.push_back(make_sphere_point(g, 1e-9));
  for (const auto& g : gen_b) hull_b.generators.push_back(make_sphere_point(g, 1e-9));
  spec.set_a = hull_a;
  spec.set_b = hull_b;
  spec.x0 = make_sphere_point({0.0, 0.5, s3}, 1e-9);
  spec.witnesses = {make_sphere_point({1.0 / 3.0, 0.0, s8}, 1e-9)};

  validate_set(spec.space, spec.set_a);
  validate_set(spec.space, spec.set_b);
  for (const auto& w : spec.witnesses) {
    if (!contains(spec.space, spec.set_a, w, 1e-9) || !contains(spec.space, spec.set_b, w, 1e-9))
      throw Error("witness-not-in-intersection", "paper-su2 witness check failed");
  }
  return spec;
}

ScenarioSpec random_ball_pair(std::uint64_t seed, double overlap) {
  if (!(overlap > 0.0)) throw Error("parameter-out-of-range", "overlap must be positive");
  const double cap_radius = 0.7;
  const double margin = 0.01;

  // centers sit within 0.1 + a_i of the cap center; the balls must fit with
  // angle(center_i, cap_center) + radius_i <= cap_radius - margin
  const double max_offset = (cap_radius - margin - 0.1 - overlap) / 2.0;
  if (max_offset < 0.01)
    throw Error("infeasible-overlap", "overlap too large for the default cap");

  ModelSpace space = make_model_space(1.0, 2, SpherePoint{{0.0, 0.0, 1.0}}, cap_radius);
  DeterministicRng rng(seed);

  // witness near the cap center
  ModelSpace witness_zone = space;
  witness_zone.cap_radius = 0.1;
  const SpherePoint w = sample_cap_point(witness_zone, rng);

  auto random_tangent_at = [&](const SpherePoint& p) -> Vec {
    Vec u(p.coords.size(), 0.0);
    double len = 0.0;
    while (len < 1e-12) {
      for (double& v : u) v = rng.next_gaussian();
      u = axpy(u, -dot(u, p.coords), p.coords);
      len = norm(u);
    }
    return scaled(u, 1.0 / len);
  };

  // center at angle `off` from the witness, radius off + overlap, so the
  // witness sits exactly `overlap` deep inside the ball
  auto make_ball = [&]() -> GeodesicBall {
    const double off = rng.next_double(0.01, max_offset);
    const Vec u = random_tangent_at(w);
    SpherePoint c{normalized(axpy(scaled(w.coords, std::cos(off)), std::sin(off), u))};
    return GeodesicBall{c, off + overlap};
  };

  ScenarioSpec spec;
  spec.name = "ball-pair";
  spec.space = space;
  spec.set_a = make_ball();
  spec.set_b = make_ball();
  spec.witnesses = {w};

  // starting point anywhere in the cap interior
  ModelSpace start_zone = space;
  start_zone.cap_radius = cap_radius - margin;
  spec.x0 = sample_cap_point(start_zone, rng);

  spec.space.c_m = estimate_c_m(spec.space, kDefaultCmSamples, kDefaultCmSeed);
  validate_set(spec.space, spec.set_a);
  validate_set(spec.space, spec.set_b);
  return spec;
}

}  // namespace catfeas
