#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace catfeas {

// Dense real vector in R^(n+1). Points on the sphere, tangent data and
// small least-squares problems all run through these helpers.
using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b);
double norm(const Vec& a);
Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scaled(const Vec& a, double s);
// a + s*b
Vec axpy(const Vec& a, double s, const Vec& b);
Vec normalized(const Vec& a);

// arccos of the clamped inner product of two unit vectors, in [0, pi].
double unit_angle(const Vec& a, const Vec& b);

// Small dense column matrix; columns.size() = k, each column in R^m.
struct ColMatrix {
  std::vector<Vec> columns;

  std::size_t cols() const { return columns.size(); }
  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  Vec apply(const std::vector<double>& coeff) const;
};

// Least squares min |A*lambda - b|_2 via normal equations with partial
// pivoting. Returns nullopt when the Gram matrix is numerically singular.
std::optional<std::vector<double>> least_squares(const ColMatrix& a, const Vec& b);

// Lawson-Hanson nonnegative least squares: min |A*lambda - b|, lambda >= 0.
std::vector<double> nonnegative_least_squares(const ColMatrix& a, const Vec& b);

// Deterministic uniform doubles in [0,1) built from a splitmix/xorshift
// generator; bit-stable across platforms for a fixed seed.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  // uniform in [0,1)
  double next_double();
  // uniform in [lo, hi)
  double next_double(double lo, double hi);
  // standard normal via Box-Muller
  double next_gaussian();

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace catfeas
