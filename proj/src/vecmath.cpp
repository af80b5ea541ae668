#include "catfeas/vecmath.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace catfeas {

double dot(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

Vec add(const Vec& a, const Vec& b) {
  Vec r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

Vec sub(const Vec& a, const Vec& b) {
  Vec r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

Vec scaled(const Vec& a, double s) {
  Vec r(a);
  for (double& x : r) x *= s;
  return r;
}

Vec axpy(const Vec& a, double s, const Vec& b) {
  Vec r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += s * b[i];
  return r;
}

Vec normalized(const Vec& a) {
  const double n = norm(a);
  if (n == 0.0) throw std::invalid_argument("normalized: zero vector");
  return scaled(a, 1.0 / n);
}

double unit_angle(const Vec& a, const Vec& b) {
  // arccos(<a,b>) in half-chord form; exact at coincident points, where the
  // inner product saturates and acos alone loses all precision
  return 2.0 * std::atan2(norm(sub(a, b)), norm(add(a, b)));
}

Vec ColMatrix::apply(const std::vector<double>& coeff) const {
  assert(coeff.size() == cols());
  Vec r(rows(), 0.0);
  for (std::size_t j = 0; j < cols(); ++j)
    for (std::size_t i = 0; i < rows(); ++i) r[i] += coeff[j] * columns[j][i];
  return r;
}

namespace {

// Solves the symmetric positive semi-definite system G*x = rhs in place.
// Returns false when a pivot falls below the singularity threshold.
bool solve_spd(std::vector<std::vector<double>> g, std::vector<double> rhs,
               std::vector<double>& out) {
  const std::size_t k = rhs.size();
  std::vector<std::size_t> perm(k);
  for (std::size_t i = 0; i < k; ++i) perm[i] = i;

  double scale = 0.0;
  for (std::size_t i = 0; i < k; ++i) scale = std::max(scale, std::abs(g[i][i]));
  const double tiny = std::max(scale, 1.0) * 1e-13;

  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < k; ++r)
      if (std::abs(g[r][col]) > std::abs(g[piv][col])) piv = r;
    if (std::abs(g[piv][col]) < tiny) return false;
    std::swap(g[piv], g[col]);
    std::swap(rhs[piv], rhs[col]);
    for (std::size_t r = col + 1; r < k; ++r) {
      const double f = g[r][col] / g[col][col];
      for (std::size_t c = col; c < k; ++c) g[r][c] -= f * g[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  out.assign(k, 0.0);
  for (std::size_t i = k; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t c = i + 1; c < k; ++c) s -= g[i][c] * out[c];
    out[i] = s / g[i][i];
  }
  return true;
}

}  // namespace

std::optional<std::vector<double>> least_squares(const ColMatrix& a, const Vec& b) {
  const std::size_t k = a.cols();
  if (k == 0) return std::nullopt;
  std::vector<std::vector<double>> gram(k, std::vector<double>(k, 0.0));
  std::vector<double> rhs(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      gram[i][j] = dot(a.columns[i], a.columns[j]);
      gram[j][i] = gram[i][j];
    }
    rhs[i] = dot(a.columns[i], b);
  }
  std::vector<double> out;
  if (!solve_spd(std::move(gram), std::move(rhs), out)) return std::nullopt;
  return out;
}

std::vector<double> nonnegative_least_squares(const ColMatrix& a, const Vec& b) {
  // Lawson-Hanson active set method.
  const std::size_t k = a.cols();
  std::vector<double> x(k, 0.0);
  std::vector<bool> passive(k, false);
  const int max_iter = static_cast<int>(6 * k) + 60;

  auto solve_passive = [&](std::vector<std::size_t>& idx) -> std::optional<std::vector<double>> {
    ColMatrix sub_a;
    idx.clear();
    for (std::size_t j = 0; j < k; ++j)
      if (passive[j]) {
        idx.push_back(j);
        sub_a.columns.push_back(a.columns[j]);
      }
    return least_squares(sub_a, b);
  };

  for (int outer = 0; outer < max_iter; ++outer) {
    // w = A^T (b - A x); bring in the coordinate with the largest positive w
    const Vec resid = sub(b, a.apply(x));
    std::size_t best = k;
    double best_w = 1e-12;
    for (std::size_t j = 0; j < k; ++j) {
      if (passive[j]) continue;
      const double w = dot(a.columns[j], resid);
      if (w > best_w) {
        best_w = w;
        best = j;
      }
    }
    if (best == k) break;  // KKT satisfied
    passive[best] = true;

    for (int inner = 0; inner < max_iter; ++inner) {
      std::vector<std::size_t> idx;
      auto sol = solve_passive(idx);
      if (!sol) {
        passive[best] = false;  // adding this column made the set degenerate
        break;
      }
      bool feasible = true;
      for (double v : *sol)
        if (v <= 0.0) feasible = false;
      if (feasible) {
        std::fill(x.begin(), x.end(), 0.0);
        for (std::size_t m = 0; m < idx.size(); ++m) x[idx[m]] = (*sol)[m];
        break;
      }
      // step toward sol until the first passive coordinate hits zero
      double alpha = 1.0;
      for (std::size_t m = 0; m < idx.size(); ++m) {
        const double xj = x[idx[m]], sj = (*sol)[m];
        if (sj <= 0.0 && xj - sj > 0.0) alpha = std::min(alpha, xj / (xj - sj));
      }
      for (std::size_t m = 0; m < idx.size(); ++m) {
        x[idx[m]] += alpha * ((*sol)[m] - x[idx[m]]);
        if (x[idx[m]] <= 1e-14) {
          x[idx[m]] = 0.0;
          passive[idx[m]] = false;
        }
      }
    }
  }
  return x;
}

std::uint64_t DeterministicRng::next_u64() {
  // splitmix64
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double DeterministicRng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double DeterministicRng::next_double(double lo, double hi) {
  return lo + (hi - lo) * next_double();
}

double DeterministicRng::next_gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  do {
    u = next_double();
  } while (u <= 0.0);
  const double v = next_double();
  const double r = std::sqrt(-2.0 * std::log(u));
  const double theta = 2.0 * 3.14159265358979323846 * v;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace catfeas
