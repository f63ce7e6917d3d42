#pragma once

// Seeded generators shared by the property tests.

#include <cmath>
#include <numbers>

#include "incl/matrix.hpp"
#include "incl/planar.hpp"
#include "incl/rng.hpp"

namespace incl::testing {

inline SquareMatrix random_matrix(SplitMix64& rng, int n, double scale = 1.0) {
  SquareMatrix a(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a.set(i, j, scale * rng.uniform(-1.0, 1.0));
  return a;
}

inline Vector random_unit(SplitMix64& rng, int n) {
  Vector v(n);
  for (auto& x : v) x = rng.normal();
  const double r = norm(v);
  for (auto& x : v) x /= r;
  return v;
}

// Random rotation from Gram-Schmidt on Gaussian columns, with det fixed to +1.
inline SquareMatrix random_rotation(SplitMix64& rng, int n) {
  std::vector<Vector> cols;
  while (static_cast<int>(cols.size()) < n) {
    Vector v(n);
    for (auto& x : v) x = rng.normal();
    for (const auto& c : cols) {
      const double p = dot(v, c);
      for (int i = 0; i < n; ++i) v[i] -= p * c[i];
    }
    const double r = norm(v);
    if (r < 1e-6) continue;
    for (auto& x : v) x /= r;
    cols.push_back(v);
  }
  SquareMatrix q(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) q.set(i, j, cols[j][i]);
  if (determinant(q) < 0.0)
    for (int i = 0; i < n; ++i) q.set(i, 0, -q(i, 0));
  return q;
}

inline Complex random_disk(SplitMix64& rng, double radius) {
  return std::polar(radius * std::sqrt(rng.uniform()), rng.uniform(-std::numbers::pi, std::numbers::pi));
}

// Dense uniform sweep of the margin objective over the half circle; the
// angular resolution is pi / samples.
inline double dense_planar_margin(const SquareMatrix& a, int samples) {
  double best = INFINITY;
  for (int j = 0; j < samples; ++j) {
    const double t = std::numbers::pi * j / samples;
    const double c = std::cos(t), s = std::sin(t);
    const double x = a(0, 0) * c + a(0, 1) * s, y = a(1, 0) * c + a(1, 1) * s;
    const double r = std::hypot(x, y);
    if (r == 0.0) continue;
    best = std::min(best, (x * c + y * s) / r);
  }
  return best;
}

}  // namespace incl::testing
