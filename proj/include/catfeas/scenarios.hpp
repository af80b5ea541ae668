#pragma once

#include <array>
#include <complex>
#include <string>

#include "catfeas/solver.hpp"

namespace catfeas {

// Element of the real-diagonal slice S of SU(2):
//   [ x   -y+iz ]
//   [ y+iz   x  ]      with x^2 + y^2 + z^2 = 1.
struct Su2Element {
  double x = 1.0;
  double y = 0.0;
  double z = 0.0;

  // row-major entries (a, -conj(b); b, conj(a)) with a = x, b = y + iz
  std::array<std::complex<double>, 4> entries() const;
};

// Identification of S^2 with S. Requires x^2+y^2+z^2 = 1 within 1e-9
// (Error "not-unit-vector"); round-trips exactly with phi_extract.
Su2Element phi_embed(double x, double y, double z);

// Inverse of phi_embed on S. Requires the determinant-1 invariant within
// 1e-12 (Error "invariant-violation").
SpherePoint phi_extract(const Su2Element& m);

// One feasibility problem instance with everything a run needs.
struct ScenarioSpec {
  std::string name;
  ModelSpace space;
  ConvexSet set_a;
  ConvexSet set_b;
  SpherePoint x0;
  std::vector<SpherePoint> witnesses;  // points of A inter B, tol 1e-9
};

// Defaults for the convexity-constant estimate baked into scenarios. The
// estimate is an empirical infimum, so the sample count errs high; the
// estimator memoizes per cap, keeping repeated scenario construction cheap.
inline constexpr int kDefaultCmSamples = 1000000;
inline constexpr std::uint64_t kDefaultCmSeed = 42;

// The S^2 / SU(2) worked instance: two spherical triangles
//   A = conv{(0,0,1), (1/2,0,sqrt3/2), (0,1/2,sqrt3/2)}
//   B = conv{(1/3,0,2sqrt2/3), (2/3,1/3,2/3), (2/3,2/3,1/3)}
// meeting at the witness (1/3, 0, 2sqrt2/3). The cap is the smallest one
// around the normalized generator mean with margin 0.05; construction fails
// loudly if that does not stay below pi/4. x0 defaults to the A generator
// (0, 1/2, sqrt3/2), which lies outside B.
ScenarioSpec paper_example();

// Two seeded geodesic balls sharing a designated witness that sits `overlap`
// deep inside both. Throws Error("infeasible-overlap") when the requested
// overlap cannot fit in the cap.
ScenarioSpec random_ball_pair(std::uint64_t seed, double overlap);

// Maps every iterate of a trace through phi_embed.
std::vector<Su2Element> embed_trace(const std::vector<SpherePoint>& iterates);

}  // namespace catfeas
