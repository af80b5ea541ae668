#include <cmath>

#include "catfeas/convex_sets.hpp"
#include "catfeas/scenarios.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace catfeas;
using catfeas::testing::error_code_of;

namespace {

constexpr double kPi = 3.14159265358979323846;

ModelSpace polar_space(double radius) {
  return make_model_space(1.0, 2, SpherePoint{{0.0, 0.0, 1.0}}, radius);
}

// random point of a set, used as a witness z for the inequality checks
SpherePoint random_point_in(const ModelSpace& space, const ConvexSet& set,
                            DeterministicRng& rng) {
  if (const auto* ball = std::get_if<GeodesicBall>(&set)) {
    ModelSpace inner = space;
    inner.cap_center = ball->center;
    inner.cap_radius = ball->radius * std::sqrt(space.kappa);
    if (inner.cap_radius < 1e-9) return ball->center;
    return sample_cap_point(inner, rng);
  }
  if (const auto* seg = std::get_if<GeodesicSegment>(&set)) {
    return geodesic_eval(make_geodesic(space, seg->a, seg->b), rng.next_double());
  }
  const auto& hull = std::get<SphericalHull>(set);
  Vec v(hull.generators.front().coords.size(), 0.0);
  double total = 0.0;
  for (const auto& g : hull.generators) {
    const double w = 0.05 + rng.next_double();
    total += w;
    v = axpy(v, w, g.coords);
  }
  return SpherePoint{normalized(scaled(v, 1.0 / total))};
}

ConvexSet random_set(const ModelSpace& space, DeterministicRng& rng, int kind) {
  if (kind == 0) {
    const SpherePoint c = sample_cap_point(space, rng);
    const double max_r =
        (space.cap_radius - unit_angle(c.coords, space.cap_center.coords)) / std::sqrt(space.kappa);
    return GeodesicBall{c, rng.next_double(0.05, 1.0) * max_r};
  }
  if (kind == 1) return GeodesicSegment{sample_cap_point(space, rng), sample_cap_point(space, rng)};
  SphericalHull hull;
  for (int i = 0; i < 3; ++i) hull.generators.push_back(sample_cap_point(space, rng));
  return hull;
}

}  // namespace

TEST_CASE("set validation") {
  const ModelSpace s = polar_space(0.5);
  CHECK(error_code_of([&] {
          validate_set(s, GeodesicBall{make_sphere_point({0.0, 0.0, 1.0}), 0.6});
        }) == "set-outside-cap");
  CHECK(error_code_of([&] { validate_set(s, SphericalHull{}); }) == "empty-generator-list");
  CHECK(error_code_of([&] {
          validate_set(s, GeodesicSegment{make_sphere_point({0.0, 0.0, 1.0}),
                                          make_sphere_point({1.0, 0.0, 0.0})});
        }) == "point-outside-cap");
}

TEST_CASE("hull membership cone test") {
  const ScenarioSpec spec = paper_example();
  const ModelSpace& s = spec.space;
  const double s8 = 2.0 * std::sqrt(2.0) / 3.0;
  const SpherePoint witness = make_sphere_point({1.0 / 3.0, 0.0, s8}, 1e-9);

  SUBCASE("generators belong to their hull") {
    for (const auto& g : std::get<SphericalHull>(spec.set_a).generators)
      CHECK(contains(s, spec.set_a, g, 1e-9));
  }

  SUBCASE("the witness lies in both example sets") {
    CHECK(contains(s, spec.set_a, witness, 1e-9));
    CHECK(contains(s, spec.set_b, witness, 1e-9));
  }

  SUBCASE("an A generator misses B by a wide margin") {
    const SpherePoint x = make_sphere_point({0.0, 0.5, std::sqrt(3.0) / 2.0}, 1e-9);
    CHECK_FALSE(contains(s, spec.set_b, x, 1e-6));
    const SpherePoint nearest = oracle_project(s, spec.set_b, x, 200);
    CHECK(distance(s, x, nearest) > 0.1);
  }

  SUBCASE("cone test agrees with oracle classification") {
    DeterministicRng rng(404);
    for (int i = 0; i < 60; ++i) {
      const SpherePoint x = sample_cap_point(s, rng);
      const double d = distance(s, x, oracle_project(s, spec.set_a, x, 120));
      if (d <= 1e-9) CHECK(contains(s, spec.set_a, x, 1e-7));
      if (d > 1e-3) CHECK_FALSE(contains(s, spec.set_a, x, 1e-7));
    }
  }

  SUBCASE("two-generator hull is its arc") {
    const SpherePoint a = make_sphere_point({0.0, 0.0, 1.0});
    const SpherePoint b = make_sphere_point({std::sin(0.4), 0.0, std::cos(0.4)});
    const ModelSpace sp = polar_space(0.5);
    const ConvexSet arc = SphericalHull{{a, b}};
    const SpherePoint on = geodesic_eval(make_geodesic(sp, a, b), 0.37);
    CHECK(contains(sp, arc, on, 1e-9));
    const SpherePoint off = make_sphere_point({std::sin(0.2), 0.1, std::sqrt(1.0 - std::sin(0.2) * std::sin(0.2) - 0.01)}, 1e-9);
    CHECK_FALSE(contains(sp, arc, off, 1e-6));
  }
}

TEST_CASE("projection closed forms") {
  const ModelSpace s = polar_space(0.7);
  const SpherePoint north = make_sphere_point({0.0, 0.0, 1.0});

  SUBCASE("ball: radial walk") {
    const ConvexSet ball = GeodesicBall{north, kPi / 12.0};
    const SpherePoint x = make_sphere_point({0.5, 0.0, std::sqrt(3.0) / 2.0}, 1e-9);
    const SpherePoint p = project(s, ball, x);
    CHECK(p.coords[0] == doctest::Approx(std::sin(kPi / 12.0)).epsilon(1e-12));
    CHECK(p.coords[1] == doctest::Approx(0.0));
    CHECK(p.coords[2] == doctest::Approx(std::cos(kPi / 12.0)).epsilon(1e-12));
    CHECK(distance_to_set(s, ball, x) == doctest::Approx(kPi / 12.0).epsilon(1e-12));
    // interior point is fixed
    CHECK(project(s, ball, north).coords == north.coords);
  }

  SUBCASE("segment: nearest endpoint") {
    const ConvexSet seg =
        GeodesicSegment{north, make_sphere_point({std::sin(0.3), 0.0, std::cos(0.3)})};
    const SpherePoint x = make_sphere_point({0.0, std::sin(0.2), std::cos(0.2)});
    const SpherePoint p = project(s, seg, x);
    CHECK(distance(s, p, north) <= 1e-9);
  }

  SUBCASE("points of the set are fixed") {
    DeterministicRng rng(11);
    for (int kind = 0; kind < 3; ++kind) {
      const ConvexSet set = random_set(s, rng, kind);
      const SpherePoint z = random_point_in(s, set, rng);
      CHECK(distance(s, project(s, set, z), z) <= 1e-9);
    }
  }
}

TEST_CASE("projection properties") {
  const ModelSpace s = polar_space(0.7);
  DeterministicRng rng(2025);

  SUBCASE("idempotence") {
    for (int rep = 0; rep < 60; ++rep) {
      const ConvexSet set = random_set(s, rng, rep % 3);
      const SpherePoint x = sample_cap_point(s, rng);
      const SpherePoint p = project(s, set, x);
      CHECK(distance(s, project(s, set, p), p) <= 1e-9);
    }
  }

  SUBCASE("variational characterization") {
    for (int rep = 0; rep < 60; ++rep) {
      const ConvexSet set = random_set(s, rng, rep % 3);
      const SpherePoint x = sample_cap_point(s, rng);
      const SpherePoint p = project(s, set, x);
      for (int j = 0; j < 5; ++j) {
        const SpherePoint z = random_point_in(s, set, rng);
        CHECK(distance(s, x, p) <= distance(s, x, z) + 1e-10);
      }
    }
  }

  SUBCASE("oracle agreement") {
    for (int rep = 0; rep < 45; ++rep) {
      const ConvexSet set = random_set(s, rng, rep % 3);
      const SpherePoint x = sample_cap_point(s, rng);
      CHECK(distance(s, project(s, set, x), oracle_project(s, set, x, 200)) <= 1e-6);
    }
  }

  SUBCASE("oracle fixes points of the set") {
    for (int kind = 0; kind < 3; ++kind) {
      const ConvexSet set = random_set(s, rng, kind);
      const SpherePoint z = random_point_in(s, set, rng);
      CHECK(distance(s, oracle_project(s, set, z, 120), z) <= 1e-6);
    }
    // a hull generator projects to itself
    const ScenarioSpec spec = paper_example();
    const SpherePoint g = std::get<SphericalHull>(spec.set_a).generators.front();
    CHECK(distance(spec.space, oracle_project(spec.space, spec.set_a, g, 200), g) <= 1e-6);
    CHECK(error_code_of([&] { oracle_project(s, random_set(s, rng, 0), sample_cap_point(s, rng), 1); }) ==
          "parameter-out-of-range");
  }
}

TEST_CASE("projection and (P1) inequalities") {
  ModelSpace s = polar_space(0.7);
  s.c_m = estimate_c_m(s, 200000, 42);
  DeterministicRng rng(31337);

  SUBCASE("z equals x inside the set") {
    const ConvexSet ball = GeodesicBall{make_sphere_point({0.0, 0.0, 1.0}), 0.2};
    const SpherePoint z = random_point_in(s, ball, rng);
    CHECK(check_projection_inequality(s, ball, z, z) == doctest::Approx(0.0).epsilon(1e-15));
  }

  SUBCASE("z at the projection foot") {
    const ConvexSet ball = GeodesicBall{make_sphere_point({0.0, 0.0, 1.0}), 0.2};
    const SpherePoint x = make_sphere_point({std::sin(0.5), 0.0, std::cos(0.5)});
    const SpherePoint p = project(s, ball, x);
    const double d = distance(s, x, p);
    CHECK(check_projection_inequality(s, ball, x, p) ==
          doctest::Approx(d * d * (1.0 - s.c_m)).epsilon(1e-12));
  }

  SUBCASE("membership precondition") {
    const ConvexSet ball = GeodesicBall{make_sphere_point({0.0, 0.0, 1.0}), 0.1};
    const SpherePoint far = make_sphere_point({std::sin(0.5), 0.0, std::cos(0.5)});
    CHECK(error_code_of([&] { check_projection_inequality(s, ball, far, far); }) == "z-not-in-set");
    CHECK(error_code_of([&] { check_p1_property(s, ball, far, far); }) == "u-not-in-set");
  }

  SUBCASE("(P1) vanishes on fixed points") {
    const ConvexSet ball = GeodesicBall{make_sphere_point({0.0, 0.0, 1.0}), 0.2};
    const SpherePoint inside = make_sphere_point({std::sin(0.1), 0.0, std::cos(0.1)});
    const SpherePoint u = random_point_in(s, ball, rng);
    CHECK(check_p1_property(s, ball, u, u) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(check_p1_property(s, ball, inside, u) == doctest::Approx(0.0).epsilon(1e-14));
  }

  SUBCASE("randomized slack and (P1) equivalence") {
    for (int rep = 0; rep < 400; ++rep) {
      const ConvexSet set = random_set(s, rng, rep % 3);
      const SpherePoint x = sample_cap_point(s, rng);
      const SpherePoint z = random_point_in(s, set, rng);
      const double slack = check_projection_inequality(s, set, x, z);
      CHECK(slack >= -1e-10);
      CHECK(check_p1_property(s, set, x, z) == doctest::Approx(slack).epsilon(1e-15));
    }
  }
}

TEST_CASE("overcomplete and degenerate generator families") {
  const ModelSpace s = polar_space(0.6);
  DeterministicRng rng(515);

  SUBCASE("five generators on the 2-sphere use the nnls fallback") {
    SphericalHull hull;
    hull.generators.push_back(make_sphere_point({0.0, 0.0, 1.0}));
    hull.generators.push_back(make_sphere_point({std::sin(0.4), 0.0, std::cos(0.4)}));
    hull.generators.push_back(make_sphere_point({0.0, std::sin(0.4), std::cos(0.4)}));
    // two interior points, redundant for the hull
    hull.generators.push_back(random_point_in(s, SphericalHull{{hull.generators[0],
                                                                hull.generators[1],
                                                                hull.generators[2]}},
                                              rng));
    hull.generators.push_back(random_point_in(s, SphericalHull{{hull.generators[0],
                                                                hull.generators[1],
                                                                hull.generators[2]}},
                                              rng));
    const ConvexSet set = hull;
    for (const auto& g : hull.generators) CHECK(contains(s, set, g, 1e-9));
    const SpherePoint inside = random_point_in(s, set, rng);
    CHECK(contains(s, set, inside, 1e-9));
    const SpherePoint outside = make_sphere_point({-std::sin(0.3), 0.0, std::cos(0.3)});
    CHECK_FALSE(contains(s, set, outside, 1e-6));
    // projection agrees with the oracle despite the redundancy
    for (int rep = 0; rep < 5; ++rep) {
      const SpherePoint x = sample_cap_point(s, rng);
      CHECK(distance(s, project(s, set, x), oracle_project(s, set, x, 40)) <= 1e-6);
    }
  }

  SUBCASE("duplicated generators stay usable") {
    const SpherePoint a = make_sphere_point({0.0, 0.0, 1.0});
    const SpherePoint b = make_sphere_point({std::sin(0.4), 0.0, std::cos(0.4)});
    const ConvexSet set = SphericalHull{{a, a, b}};
    CHECK(contains(s, set, a, 1e-9));
    const SpherePoint x = make_sphere_point({0.0, std::sin(0.2), std::cos(0.2)});
    CHECK(distance(s, project(s, set, x), oracle_project(s, set, x, 100)) <= 1e-6);
  }

  SUBCASE("zero-length segment projects to its endpoint") {
    const SpherePoint a = make_sphere_point({std::sin(0.2), 0.0, std::cos(0.2)});
    const ConvexSet seg = GeodesicSegment{a, a};
    const SpherePoint x = sample_cap_point(s, rng);
    CHECK(project(s, seg, x).coords == a.coords);
  }
}

TEST_CASE("three-sphere geometry takes the generic paths") {
  const ModelSpace s = make_model_space(1.0, 3, SpherePoint{{0.0, 0.0, 0.0, 1.0}}, 0.6);
  DeterministicRng rng(616);

  const ConvexSet ball = GeodesicBall{sample_cap_point(s, rng), 0.15};
  const ConvexSet seg = GeodesicSegment{sample_cap_point(s, rng), sample_cap_point(s, rng)};
  SphericalHull hull;
  for (int i = 0; i < 4; ++i) hull.generators.push_back(sample_cap_point(s, rng));
  const ConvexSet hull_set = hull;

  SUBCASE("projections match the oracle") {
    for (int rep = 0; rep < 6; ++rep) {
      const SpherePoint x = sample_cap_point(s, rng);
      CHECK(distance(s, project(s, ball, x), oracle_project(s, ball, x, 200)) <= 1e-6);
      CHECK(distance(s, project(s, seg, x), oracle_project(s, seg, x, 200)) <= 1e-6);
      CHECK(distance(s, project(s, hull_set, x), oracle_project(s, hull_set, x, 40)) <= 1e-6);
    }
  }

  SUBCASE("alternating projections converge on overlapping balls") {
    ModelSpace inner = s;
    inner.cap_radius = 0.3;
    const SpherePoint w = sample_cap_point(inner, rng);
    ModelSpace near_w = s;
    near_w.cap_center = w;
    near_w.cap_radius = 0.08;
    const ConvexSet b1 = GeodesicBall{sample_cap_point(near_w, rng), 0.12};
    const ConvexSet b2 = GeodesicBall{sample_cap_point(near_w, rng), 0.1};
    SolverConfig cfg;
    cfg.step_tolerance = 1e-10;
    const IterationTrace trace = alternate(s, b1, b2, sample_cap_point(s, rng), cfg);
    CHECK(trace.stop_reason == StopReason::StepTolerance);
    CHECK(distance_to_set(s, b1, trace.iterates.back()) <= 1e-8);
    CHECK(distance_to_set(s, b2, trace.iterates.back()) <= 1e-8);
  }
}

TEST_CASE("distance to intersection") {
  const ScenarioSpec spec = paper_example();
  const ModelSpace& s = spec.space;
  const SpherePoint witness = spec.witnesses.front();

  SUBCASE("points of the intersection read zero") {
    CHECK(distance_to_intersection(s, spec.set_a, spec.set_b, witness, 120) == 0.0);
  }

  SUBCASE("lower bound by set distances") {
    const double d = distance_to_intersection(s, spec.set_a, spec.set_b, spec.x0, 120);
    CHECK(d >= distance_to_set(s, spec.set_a, spec.x0) - 1e-9);
    CHECK(d >= distance_to_set(s, spec.set_b, spec.x0) - 1e-9);
  }

  SUBCASE("disjoint sets are reported") {
    const ModelSpace sp = polar_space(0.7);
    const ConvexSet b1 =
        GeodesicBall{make_sphere_point({std::sin(0.4), 0.0, std::cos(0.4)}), 0.1};
    const ConvexSet b2 =
        GeodesicBall{make_sphere_point({-std::sin(0.4), 0.0, std::cos(0.4)}), 0.1};
    CHECK(error_code_of([&] {
            distance_to_intersection(sp, b1, b2, make_sphere_point({0.0, 0.0, 1.0}), 60);
          }) == "empty-intersection-detected");
  }
}
