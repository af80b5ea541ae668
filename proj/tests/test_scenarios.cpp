#include <cmath>
#include <complex>

#include "catfeas/scenarios.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace catfeas;
using catfeas::testing::error_code_of;

namespace {
constexpr double kPi = 3.14159265358979323846;
using C = std::complex<double>;
}  // namespace

TEST_CASE("phi embedding of the named elements") {
  const double s3 = std::sqrt(3.0) / 2.0;
  const double s8 = 2.0 * std::sqrt(2.0) / 3.0;

  SUBCASE("north pole") {
    const auto m = phi_embed(0.0, 0.0, 1.0).entries();
    CHECK(m[0] == C(0.0, 0.0));
    CHECK(m[1] == C(0.0, 1.0));
    CHECK(m[2] == C(0.0, 1.0));
    CHECK(m[3] == C(0.0, 0.0));
  }

  SUBCASE("first A generator off the pole") {
    const auto m = phi_embed(0.5, 0.0, s3).entries();
    CHECK(m[0] == C(0.5, 0.0));
    CHECK(m[1] == C(0.0, s3));
    CHECK(m[2] == C(0.0, s3));
    CHECK(m[3] == C(0.5, 0.0));
  }

  SUBCASE("the witness generator of B") {
    const auto m = phi_embed(1.0 / 3.0, 0.0, s8).entries();
    CHECK(m[0] == C(1.0 / 3.0, 0.0));
    CHECK(m[1] == C(0.0, s8));
    CHECK(m[2] == C(0.0, s8));
    CHECK(m[3] == C(1.0 / 3.0, 0.0));
  }

  SUBCASE("generators with all three coordinates") {
    // (0, 1/2, sqrt3/2) -> [[0, -1/2 + i sqrt3/2], [1/2 + i sqrt3/2, 0]]
    const auto m3 = phi_embed(0.0, 0.5, s3).entries();
    CHECK(m3[0] == C(0.0, 0.0));
    CHECK(m3[1] == C(-0.5, s3));
    CHECK(m3[2] == C(0.5, s3));
    CHECK(m3[3] == C(0.0, 0.0));

    // (2/3, 1/3, 2/3) -> [[2/3, -1/3 + i 2/3], [1/3 + i 2/3, 2/3]]
    const auto m5 = phi_embed(2.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0).entries();
    CHECK(m5[1] == C(-1.0 / 3.0, 2.0 / 3.0));
    CHECK(m5[2] == C(1.0 / 3.0, 2.0 / 3.0));

    // (2/3, 2/3, 1/3) -> [[2/3, -2/3 + i/3], [2/3 + i/3, 2/3]]
    const auto m6 = phi_embed(2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0).entries();
    CHECK(m6[0] == C(2.0 / 3.0, 0.0));
    CHECK(m6[1] == C(-2.0 / 3.0, 1.0 / 3.0));
    CHECK(m6[2] == C(2.0 / 3.0, 1.0 / 3.0));
    CHECK(m6[3] == C(2.0 / 3.0, 0.0));
  }

  SUBCASE("non-unit input is rejected") {
    CHECK(error_code_of([] { phi_embed(0.5, 0.5, 0.5); }) == "not-unit-vector");
  }
}

TEST_CASE("phi extraction and round trips") {
  SUBCASE("named elements extract to their coordinates") {
    CHECK(phi_extract(phi_embed(0.0, 0.0, 1.0)).coords == Vec{0.0, 0.0, 1.0});
    const SpherePoint m6 = phi_extract(phi_embed(2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0));
    CHECK(m6.coords == Vec{2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0});
  }

  SUBCASE("corrupted elements are rejected") {
    Su2Element bad;
    bad.x = 0.9;
    bad.y = 0.0;
    bad.z = 0.0;
    CHECK(error_code_of([&] { phi_extract(bad); }) == "invariant-violation");
  }

  SUBCASE("round trip is the identity on random unit vectors") {
    DeterministicRng rng(60);
    for (int i = 0; i < 100; ++i) {
      Vec v{rng.next_gaussian(), rng.next_gaussian(), rng.next_gaussian()};
      v = normalized(v);
      const SpherePoint back = phi_extract(phi_embed(v[0], v[1], v[2]));
      CHECK(back.coords == v);
    }
  }

  SUBCASE("the embedding preserves the metric") {
    // entries viewed as a unit vector in R^4 reproduce the sphere angle
    DeterministicRng rng(61);
    for (int i = 0; i < 50; ++i) {
      Vec p{rng.next_gaussian(), rng.next_gaussian(), rng.next_gaussian()};
      Vec q{rng.next_gaussian(), rng.next_gaussian(), rng.next_gaussian()};
      p = normalized(p);
      q = normalized(q);
      const auto mp = phi_embed(p[0], p[1], p[2]).entries();
      const auto mq = phi_embed(q[0], q[1], q[2]).entries();
      const double dot4 = mp[0].real() * mq[0].real() + mp[2].real() * mq[2].real() +
                          mp[2].imag() * mq[2].imag() + mp[0].imag() * mq[0].imag();
      CHECK(dot4 == doctest::Approx(dot(p, q)).epsilon(1e-12));
    }
  }
}

TEST_CASE("paper-su2 scenario construction") {
  const ScenarioSpec spec = paper_example();

  SUBCASE("identity card") {
    CHECK(spec.name == "paper-su2");
    CHECK(spec.space.kappa == 1.0);
    CHECK(spec.space.cap_radius < kPi / 4.0);
    CHECK(spec.x0.coords == Vec{0.0, 0.5, std::sqrt(3.0) / 2.0});
  }

  SUBCASE("witness membership is exact") {
    for (const auto& w : spec.witnesses) {
      CHECK(contains(spec.space, spec.set_a, w, 1e-12));
      CHECK(contains(spec.space, spec.set_b, w, 1e-12));
    }
  }

  SUBCASE("generators fit well inside a hemisphere") {
    std::vector<SpherePoint> all = std::get<SphericalHull>(spec.set_a).generators;
    const auto& gb = std::get<SphericalHull>(spec.set_b).generators;
    all.insert(all.end(), gb.begin(), gb.end());
    for (std::size_t i = 0; i < all.size(); ++i)
      for (std::size_t j = i + 1; j < all.size(); ++j)
        CHECK(unit_angle(all[i].coords, all[j].coords) < kPi / 2.0);
  }

  SUBCASE("end-to-end solve lands in both sets") {
    SolverConfig cfg;
    cfg.step_tolerance = 1e-10;
    const IterationTrace trace =
        alternate(spec.space, spec.set_a, spec.set_b, spec.x0, cfg);
    CHECK(trace.stop_reason == StopReason::StepTolerance);
    CHECK(distance_to_set(spec.space, spec.set_a, trace.iterates.back()) <= 1e-8);
    CHECK(distance_to_set(spec.space, spec.set_b, trace.iterates.back()) <= 1e-8);
  }
}

TEST_CASE("ball pair scenarios") {
  SUBCASE("witnesses hold exactly by construction") {
    for (std::uint64_t seed : {1ull, 9ull, 77ull}) {
      const ScenarioSpec bp = random_ball_pair(seed, 0.05);
      for (const auto& w : bp.witnesses) {
        CHECK(contains(bp.space, bp.set_a, w, 1e-12));
        CHECK(contains(bp.space, bp.set_b, w, 1e-12));
      }
    }
  }

  SUBCASE("the witness is a fixed point of the iteration") {
    const ScenarioSpec bp = random_ball_pair(4, 0.3);
    SolverConfig cfg;
    cfg.step_tolerance = 1e-10;
    const IterationTrace trace =
        alternate(bp.space, bp.set_a, bp.set_b, bp.witnesses.front(), cfg);
    CHECK(trace.iterates.size() == 3);
    for (const auto& it : trace.iterates) CHECK(it.coords == bp.witnesses.front().coords);
  }

  SUBCASE("tangent-limit overlap still terminates") {
    const ScenarioSpec bp = random_ball_pair(3, 1e-6);
    SolverConfig cfg;
    cfg.step_tolerance = 1e-10;
    cfg.max_iterations = 5000;
    const IterationTrace trace = alternate(bp.space, bp.set_a, bp.set_b, bp.x0, cfg);
    CHECK(trace.iterates.size() <= 5001);
  }

  SUBCASE("excessive overlap is rejected") {
    CHECK(error_code_of([] { random_ball_pair(1, 0.6); }) == "infeasible-overlap");
    CHECK(error_code_of([] { random_ball_pair(1, 0.0); }) == "parameter-out-of-range");
  }

  SUBCASE("seeds reproduce scenarios exactly") {
    const ScenarioSpec a = random_ball_pair(123, 0.05);
    const ScenarioSpec b = random_ball_pair(123, 0.05);
    CHECK(a.x0.coords == b.x0.coords);
    CHECK(std::get<GeodesicBall>(a.set_a).center.coords ==
          std::get<GeodesicBall>(b.set_a).center.coords);
    CHECK(std::get<GeodesicBall>(a.set_b).radius == std::get<GeodesicBall>(b.set_b).radius);
  }
}

TEST_CASE("embedding a whole trace") {
  const ScenarioSpec spec = paper_example();
  SolverConfig cfg;
  cfg.step_tolerance = 1e-10;
  const IterationTrace trace = alternate(spec.space, spec.set_a, spec.set_b, spec.x0, cfg);
  const std::vector<Su2Element> mapped = embed_trace(trace.iterates);
  REQUIRE(mapped.size() == trace.iterates.size());
  for (std::size_t i = 0; i < mapped.size(); ++i)
    CHECK(phi_extract(mapped[i]).coords == trace.iterates[i].coords);
}
