#include "incl/matrix_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <queue>
#include <string>

#include "incl/rng.hpp"

namespace incl {

namespace {

using Vec6 = std::array<double, SquareMatrix::kMaxDim>;
constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Singular values

Vector jacobi_singular_values(const SquareMatrix& a) {
  const int n = a.dim();
  // Column-major copy; one-sided Jacobi orthogonalizes the columns in place.
  std::array<double, 36> u{};
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) u[j * n + i] = a(i, j);

  constexpr double tol = 1e-15;
  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (int i = 0; i < n; ++i) {
          const double x = u[p * n + i], y = u[q * n + i];
          alpha += x * x;
          beta += y * y;
          gamma += x * y;
        }
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        for (int i = 0; i < n; ++i) {
          const double x = u[p * n + i], y = u[q * n + i];
          u[p * n + i] = c * x - s * y;
          u[q * n + i] = s * x + c * y;
        }
      }
    }
    if (!rotated) break;
  }
  Vector sigma(n);
  for (int j = 0; j < n; ++j) sigma[j] = norm(std::span<const double>(&u[j * n], n));
  std::sort(sigma.begin(), sigma.end(), std::greater<>());
  return sigma;
}

// ---------------------------------------------------------------------------
// Margin objective

struct Objective {
  const SquareMatrix& a;
  int n;
  double skip;  // |A xi| below this is treated as A xi = 0

  // g(xi) for unit xi; also reports |A xi|.
  double value(const double* xi, double* image_norm = nullptr) const {
    if (n == 2) {
      const double x = a(0, 0) * xi[0] + a(0, 1) * xi[1];
      const double y = a(1, 0) * xi[0] + a(1, 1) * xi[1];
      const double na = norm(std::array<double, 2>{x, y});
      if (image_norm) *image_norm = na;
      if (na <= skip) return kInf;
      return (x * xi[0] + y * xi[1]) / na;
    }
    Vec6 ax{};
    a.apply(std::span<const double>(xi, n), std::span<double>(ax.data(), n));
    const double na = norm(std::span<const double>(ax.data(), n));
    if (image_norm) *image_norm = na;
    if (na <= skip) return kInf;
    return dot(std::span<const double>(ax.data(), n), std::span<const double>(xi, n)) / na;
  }

  // Tangential gradient of g at unit xi; returns false where g is undefined.
  bool tangent_gradient(const double* xi, double* out) const {
    Vec6 ax{}, atx{}, atax{};
    a.apply(std::span<const double>(xi, n), std::span<double>(ax.data(), n));
    const double na = norm(std::span<const double>(ax.data(), n));
    if (na <= skip) return false;
    for (int j = 0; j < n; ++j) {
      double s1 = 0.0, s2 = 0.0;
      for (int i = 0; i < n; ++i) {
        s1 += a(i, j) * xi[i];
        s2 += a(i, j) * ax[i];
      }
      atx[j] = s1;
      atax[j] = s2;
    }
    const double inner = dot(std::span<const double>(ax.data(), n), std::span<const double>(xi, n));
    const double c = inner / (na * na * na);
    double radial = 0.0;
    for (int i = 0; i < n; ++i) {
      out[i] = (ax[i] + atx[i]) / na - c * atax[i];
      radial += out[i] * xi[i];
    }
    for (int i = 0; i < n; ++i) out[i] -= radial * xi[i];
    return true;
  }
};

void normalize(double* x, int n) {
  const double r = norm(std::span<const double>(x, n));
  for (int i = 0; i < n; ++i) x[i] /= r;
}

struct Candidate {
  double value = kInf;
  Vec6 xi{};
};

// Unit eigenvectors for the negative real eigenvalues of `a`. They attain
// g = -1 exactly, but their basins can be too narrow for sampled seeds.
std::vector<Vec6> negative_eigenvectors(const SquareMatrix& a);

// Riemannian gradient descent with Barzilai-Borwein steps and an Armijo
// safeguard, retracting by normalization.
Candidate polish(const Objective& g, Candidate start, long& evals) {
  const int n = g.n;
  Candidate cur = start;
  if (!std::isfinite(cur.value)) return cur;
  Vec6 grad{}, prev_grad{}, prev_xi{};
  bool have_prev = false;
  double step = 0.1;
  for (int iter = 0; iter < 400; ++iter) {
    if (!g.tangent_gradient(cur.xi.data(), grad.data())) break;
    const double gn2 = dot(std::span<const double>(grad.data(), n), std::span<const double>(grad.data(), n));
    if (gn2 < 1e-28) break;
    if (have_prev) {
      double ss = 0.0, sy = 0.0;
      for (int i = 0; i < n; ++i) {
        const double s = cur.xi[i] - prev_xi[i];
        const double y = grad[i] - prev_grad[i];
        ss += s * s;
        sy += s * y;
      }
      if (sy > 0.0) step = std::clamp(ss / sy, 1e-12, 10.0);
    }
    bool accepted = false;
    Candidate trial;
    for (int bt = 0; bt < 60; ++bt) {
      for (int i = 0; i < n; ++i) trial.xi[i] = cur.xi[i] - step * grad[i];
      normalize(trial.xi.data(), n);
      trial.value = g.value(trial.xi.data());
      ++evals;
      if (trial.value <= cur.value - 1e-4 * step * gn2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    prev_xi = cur.xi;
    prev_grad = grad;
    have_prev = true;
    const double improvement = cur.value - trial.value;
    cur = trial;
    if (improvement < 1e-17) break;
  }
  return cur;
}

// Damped Newton on the sphere for the final candidate. Gradient descent
// crawls along the narrow valleys that appear when A has an eigenvalue
// pair close to the negative real axis.
Candidate newton_polish(const Objective& g, Candidate cur, long& evals) {
  const int n = g.n, m = n - 1;
  if (n < 3 || !std::isfinite(cur.value)) return cur;
  double mu = 1e-8;
  for (int iter = 0; iter < 40; ++iter) {
    // Orthonormal tangent basis at xi.
    std::array<Vec6, SquareMatrix::kMaxDim> basis{};
    int filled = 0;
    for (int k = 0; k < n && filled < m; ++k) {
      Vec6 e{};
      e[k] = 1.0;
      auto project = [&](const Vec6& v) {
        const double c = dot(std::span<const double>(e.data(), n), std::span<const double>(v.data(), n));
        for (int i = 0; i < n; ++i) e[i] -= c * v[i];
      };
      project(cur.xi);
      for (int j = 0; j < filled; ++j) project(basis[j]);
      const double r = norm(std::span<const double>(e.data(), n));
      if (r < 0.3) continue;
      for (int i = 0; i < n; ++i) e[i] /= r;
      basis[filled++] = e;
    }
    if (filled < m) return cur;
    auto at = [&](const Vec6& v, const double* u) {
      Vec6 x = v;
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) x[i] += u[j] * basis[j][i];
      normalize(x.data(), n);
      return x;
    };
    auto coord_grad = [&](const Vec6& x, double* out) {
      Vec6 gr{};
      if (!g.tangent_gradient(x.data(), gr.data())) return false;
      for (int j = 0; j < m; ++j) out[j] = dot(std::span<const double>(gr.data(), n), std::span<const double>(basis[j].data(), n));
      return true;
    };
    double grad[SquareMatrix::kMaxDim];
    if (!coord_grad(cur.xi, grad)) return cur;
    SquareMatrix hess(std::max(m, 2));
    constexpr double h = 1e-6;
    for (int j = 0; j < m; ++j) {
      double u[SquareMatrix::kMaxDim] = {};
      double gp[SquareMatrix::kMaxDim], gm[SquareMatrix::kMaxDim];
      u[j] = h;
      if (!coord_grad(at(cur.xi, u), gp)) return cur;
      u[j] = -h;
      if (!coord_grad(at(cur.xi, u), gm)) return cur;
      for (int k = 0; k < m; ++k) hess.set(k, j, (gp[k] - gm[k]) / (2.0 * h));
    }
    evals += 2 * m + 1;
    bool improved = false;
    for (int tries = 0; tries < 12 && !improved; ++tries, mu *= 10.0) {
      SquareMatrix damped(std::max(m, 2));
      if (m == 1) damped.set(1, 1, 1.0);  // pad a 1 x 1 system
      for (int k = 0; k < m; ++k)
        for (int j = 0; j < m; ++j) damped.set(k, j, 0.5 * (hess(k, j) + hess(j, k)) + (k == j ? mu : 0.0));
      SquareMatrix inv(damped.dim());
      try {
        inv = inverse(damped);
      } catch (const Error&) {
        continue;
      }
      double u[SquareMatrix::kMaxDim] = {};
      for (int k = 0; k < m; ++k)
        for (int j = 0; j < m; ++j) u[k] -= inv(k, j) * grad[j];
      Candidate trial;
      trial.xi = at(cur.xi, u);
      trial.value = g.value(trial.xi.data());
      ++evals;
      if (trial.value < cur.value) {
        cur = trial;
        improved = true;
        mu = std::max(mu / 100.0, 1e-12);
      }
    }
    if (!improved) break;
  }
  return cur;
}

Candidate with_eigen_seeds(const Objective& g, Candidate best, long& evals) {
  for (const Vec6& v : negative_eigenvectors(g.a)) {
    Candidate c;
    c.xi = v;
    c.value = g.value(c.xi.data());
    ++evals;
    c = polish(g, c, evals);
    if (c.value < best.value) best = c;
  }
  return best;
}

Candidate golden_refine(const Objective& g, double lo, double hi, long& evals) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto eval = [&](double t) {
    const std::array<double, 2> xi{std::cos(t), std::sin(t)};
    ++evals;
    return g.value(xi.data());
  };
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = eval(x1), f2 = eval(x2);
  while (hi - lo > 1e-13) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = eval(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = eval(x2);
    }
  }
  Candidate c;
  const double t = f1 <= f2 ? x1 : x2;
  c.value = std::min(f1, f2);
  c.xi[0] = std::cos(t);
  c.xi[1] = std::sin(t);
  return c;
}

constexpr int kPlanarGrid = 4096;

// Unit vectors at angles pi i / kPlanarGrid.
const std::vector<std::array<double, 2>>& planar_grid() {
  static const std::vector<std::array<double, 2>> grid = [] {
    std::vector<std::array<double, 2>> g(kPlanarGrid);
    for (int i = 0; i < kPlanarGrid; ++i) {
      const double t = std::numbers::pi * i / kPlanarGrid;
      g[i] = {std::cos(t), std::sin(t)};
    }
    return g;
  }();
  return grid;
}

Candidate margin_planar(const Objective& g, long& evals) {
  constexpr int kGrid = kPlanarGrid;
  const double h = std::numbers::pi / kGrid;
  const auto& grid = planar_grid();
  std::vector<double> vals(kGrid);
  for (int i = 0; i < kGrid; ++i) vals[i] = g.value(grid[i].data());
  evals += kGrid;
  // g(-xi) = g(xi), so the half circle is periodic with period pi.
  std::vector<int> minima;
  for (int i = 0; i < kGrid; ++i) {
    const double v = vals[i];
    if (!std::isfinite(v)) continue;
    if (v <= vals[(i + kGrid - 1) % kGrid] && v <= vals[(i + 1) % kGrid]) minima.push_back(i);
  }
  std::sort(minima.begin(), minima.end(), [&](int x, int y) { return vals[x] < vals[y]; });
  Candidate best;
  for (int i = 0; i < kGrid; ++i) {
    if (vals[i] < best.value) {
      best.value = vals[i];
      best.xi = {grid[i][0], grid[i][1]};
    }
  }
  for (std::size_t m = 0; m < std::min<std::size_t>(minima.size(), 4); ++m) {
    const int i = minima[m];
    const Candidate c = golden_refine(g, (i - 1) * h, (i + 1) * h, evals);
    if (c.value < best.value) best = c;
  }
  return best;
}

std::vector<Candidate> spread_seeds(std::vector<Candidate> pool, int n, std::size_t count, double min_angle) {
  std::sort(pool.begin(), pool.end(), [](const Candidate& x, const Candidate& y) { return x.value < y.value; });
  std::vector<Candidate> seeds;
  const double cos_min = std::cos(min_angle);
  for (const auto& c : pool) {
    if (!std::isfinite(c.value)) break;
    bool far = true;
    for (const auto& s : seeds) {
      if (std::abs(dot(std::span<const double>(c.xi.data(), n), std::span<const double>(s.xi.data(), n))) > cos_min) {
        far = false;
        break;
      }
    }
    if (far) seeds.push_back(c);
    if (seeds.size() == count) break;
  }
  return seeds;
}

Candidate margin_sphere(const Objective& g, long& evals) {
  constexpr int kPoints = 2048;
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Candidate> pool(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / kPoints;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * i;
    pool[i].xi = {r * std::cos(phi), r * std::sin(phi), z};
    pool[i].value = g.value(pool[i].xi.data());
  }
  evals += kPoints;
  Candidate best = *std::min_element(pool.begin(), pool.end(),
                                     [](const Candidate& x, const Candidate& y) { return x.value < y.value; });
  for (const auto& seed : spread_seeds(std::move(pool), 3, 8, 0.1)) {
    const Candidate c = polish(g, seed, evals);
    if (c.value < best.value) best = c;
  }
  return best;
}

Candidate margin_high_dim(const Objective& g, long& evals) {
  const int n = g.n;
  constexpr int kRestarts = 64;
  constexpr int kPool = 16 * kRestarts;
  // Fixed internal seed: the margin is a deterministic function of A.
  SplitMix64 rng(0x6D617267696EULL);
  std::vector<Candidate> pool;
  pool.reserve(kPool + 2 * n);
  for (int k = 0; k < n; ++k) {
    Candidate c;
    c.xi[k] = 1.0;
    c.value = g.value(c.xi.data());
    pool.push_back(c);
  }
  for (int k = 0; k < kPool; ++k) {
    Candidate c;
    for (int i = 0; i < n; ++i) c.xi[i] = rng.normal();
    normalize(c.xi.data(), n);
    c.value = g.value(c.xi.data());
    pool.push_back(c);
  }
  evals += static_cast<long>(pool.size());
  Candidate best = *std::min_element(pool.begin(), pool.end(),
                                     [](const Candidate& x, const Candidate& y) { return x.value < y.value; });
  for (const auto& seed : spread_seeds(std::move(pool), n, kRestarts, 0.02)) {
    const Candidate c = polish(g, seed, evals);
    if (c.value < best.value) best = c;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Certified branch-and-bound

struct Cell {
  double lower;
  int face;  // -1 for the planar half circle
  double u0, u1, v0, v1;
  bool operator>(const Cell& o) const { return lower > o.lower; }
};

struct CellEval {
  double value;
  double lower;
  Vec6 xi;
};

constexpr long kCertifyBudget = 1L << 24;

MarginResult certify_margin(const Objective& g, double sigma1, double resolution) {
  const int n = g.n;
  MarginResult out;
  out.certified = true;
  Candidate best;
  long evals = 0;

  auto center_of = [&](const Cell& c, Vec6& xi, double& radius) {
    if (n == 2) {
      const double t = 0.5 * (c.u0 + c.u1);
      xi = {std::cos(t), std::sin(t)};
      radius = 0.5 * (c.u1 - c.u0);
    } else {
      const double u = 0.5 * (c.u0 + c.u1), v = 0.5 * (c.v0 + c.v1);
      xi = {};
      xi[c.face] = 1.0;
      xi[(c.face + 1) % 3] = u;
      xi[(c.face + 2) % 3] = v;
      normalize(xi.data(), 3);
      // Radial projection from the cube surface onto the sphere is
      // 1-Lipschitz, so the chord is at most the patch half-diagonal.
      const double chord = 0.5 * std::hypot(c.u1 - c.u0, c.v1 - c.v0);
      radius = 2.0 * std::asin(std::min(1.0, 0.5 * chord));
    }
  };
  auto evaluate = [&](Cell& c) {
    Vec6 xi{};
    double radius = 0.0, image = 0.0;
    center_of(c, xi, radius);
    const double v = g.value(xi.data(), &image);
    ++evals;
    if (v < best.value) {
      best.value = v;
      best.xi = xi;
    }
    // Along a unit-speed geodesic, with p = <A xi, xi>, q = |A xi| >= eta and
    // |p| <= q: |g'| <= 3 s and |g''| <= 4 s + 8 s^2, where s = sigma1 / eta.
    const double eta = image - sigma1 * radius;
    double lower = -1.0;
    if (eta > 0.0 && std::isfinite(v)) {
      const double s = sigma1 / eta;
      lower = std::max(lower, v - 3.0 * s * radius);
      std::array<double, 6> grad{};
      if (g.tangent_gradient(xi.data(), grad.data())) {
        const double gn = norm(std::span<const double>(grad.data(), n)) * (1.0 + 1e-12) + 1e-15 * s;
        lower = std::max(lower, v - gn * radius - 0.5 * (4.0 * s + 8.0 * s * s) * radius * radius);
      }
    }
    c.lower = lower;
  };

  std::priority_queue<Cell, std::vector<Cell>, std::greater<>> heap;
  if (n == 2) {
    constexpr int kInit = 64;
    for (int i = 0; i < kInit; ++i) {
      Cell c{0.0, -1, std::numbers::pi * i / kInit, std::numbers::pi * (i + 1) / kInit, 0.0, 0.0};
      evaluate(c);
      heap.push(c);
    }
  } else {
    constexpr int kInit = 8;
    for (int f = 0; f < 3; ++f)
      for (int i = 0; i < kInit; ++i)
        for (int j = 0; j < kInit; ++j) {
          const double h = 2.0 / kInit;
          Cell c{0.0, f, -1.0 + i * h, -1.0 + (i + 1) * h, -1.0 + j * h, -1.0 + (j + 1) * h};
          evaluate(c);
          heap.push(c);
        }
  }

  double global_lower = -1.0;
  while (!heap.empty()) {
    const Cell top = heap.top();
    global_lower = top.lower;
    if (best.value - global_lower <= resolution) break;
    if (evals > kCertifyBudget) {
      throw Error(Errc::CertificationUnavailable,
                  "certification budget exhausted at gap " + std::to_string(best.value - global_lower));
    }
    heap.pop();
    if (n == 2) {
      const double mid = 0.5 * (top.u0 + top.u1);
      Cell a{0.0, -1, top.u0, mid, 0.0, 0.0}, b{0.0, -1, mid, top.u1, 0.0, 0.0};
      evaluate(a);
      evaluate(b);
      heap.push(a);
      heap.push(b);
    } else {
      const double um = 0.5 * (top.u0 + top.u1), vm = 0.5 * (top.v0 + top.v1);
      const std::array<Cell, 4> kids{Cell{0.0, top.face, top.u0, um, top.v0, vm},
                                     Cell{0.0, top.face, um, top.u1, top.v0, vm},
                                     Cell{0.0, top.face, top.u0, um, vm, top.v1},
                                     Cell{0.0, top.face, um, top.u1, vm, top.v1}};
      for (Cell k : kids) {
        evaluate(k);
        heap.push(k);
      }
    }
  }
  out.value = best.value;
  out.witness.assign(best.xi.begin(), best.xi.begin() + n);
  // Rounding in the objective is a few ulps of |g| <= 1.
  out.error_bound = std::max(0.0, best.value - global_lower) + 8.0 * std::numeric_limits<double>::epsilon();
  out.evaluations = evals;
  return out;
}

// ---------------------------------------------------------------------------
// Polynomials for the Sturm test

using Poly = std::vector<long double>;  // highest degree first

long double max_abs(const Poly& p) {
  long double m = 0.0L;
  for (auto c : p) m = std::max(m, std::abs(c));
  return m;
}

Poly normalized(Poly p) {
  const long double m = max_abs(p);
  if (m > 0.0L)
    for (auto& c : p) c /= m;
  return p;
}

Poly derivative(const Poly& p) {
  const int deg = static_cast<int>(p.size()) - 1;
  Poly d;
  for (int i = 0; i < deg; ++i) d.push_back(p[i] * static_cast<long double>(deg - i));
  return d;
}

// Remainder of a / b, with near-zero leading terms stripped relative to `a`.
Poly remainder(Poly a, const Poly& b) {
  const long double scale = max_abs(a);
  while (a.size() >= b.size()) {
    const long double f = a.front() / b.front();
    for (std::size_t i = 0; i < b.size(); ++i) a[i] -= f * b[i];
    a.erase(a.begin());
  }
  while (!a.empty() && std::abs(a.front()) <= 1e-13L * scale) a.erase(a.begin());
  return a;
}

long double horner(const Poly& p, long double x) {
  long double s = 0.0L;
  for (auto c : p) s = s * x + c;
  return s;
}

int sign_of(long double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

struct SturmChain {
  std::vector<Poly> polys;

  explicit SturmChain(const Poly& p) {
    polys.push_back(normalized(p));
    if (p.size() <= 1) return;
    polys.push_back(normalized(derivative(polys[0])));
    while (polys.back().size() > 1) {
      Poly r = remainder(polys[polys.size() - 2], polys.back());
      if (r.empty()) break;
      for (auto& c : r) c = -c;
      polys.push_back(normalized(std::move(r)));
    }
  }

  int changes_at(long double x) const {
    int count = 0, last = 0;
    for (const auto& p : polys) {
      const int s = sign_of(horner(p, x));
      if (s == 0) continue;
      if (last != 0 && s != last) ++count;
      last = s;
    }
    return count;
  }

  int changes_at_minus_infinity() const {
    int count = 0, last = 0;
    for (const auto& p : polys) {
      const int deg = static_cast<int>(p.size()) - 1;
      int s = sign_of(p.front());
      if (deg % 2 == 1) s = -s;
      if (s == 0) continue;
      if (last != 0 && s != last) ++count;
      last = s;
    }
    return count;
  }
};

std::vector<Vec6> negative_eigenvectors(const SquareMatrix& a) {
  std::vector<Vec6> out;
  const int n = a.dim();
  const double scale = a.max_abs();
  if (scale == 0.0) return out;
  const SquareMatrix b = a.scaled(1.0 / scale);
  const SturmChain chain(characteristic_polynomial(b));
  // |b_ij| <= 1 puts every eigenvalue of b inside [-n, n]. Bisect (lo, 0]
  // down to isolated roots.
  std::vector<long double> roots;
  std::vector<std::pair<long double, long double>> stack{{-n - 1.0L, -1e-12L}};
  while (!stack.empty()) {
    const auto [lo, hi] = stack.back();
    stack.pop_back();
    const int count = chain.changes_at(lo) - chain.changes_at(hi);
    if (count <= 0) continue;
    if (hi - lo < 1e-15L) {
      roots.push_back(0.5L * (lo + hi));
      continue;
    }
    const long double mid = 0.5L * (lo + hi);
    stack.push_back({lo, mid});
    stack.push_back({mid, hi});
  }
  for (long double mu : roots) {
    // Inverse iteration with a slightly perturbed shift.
    const double shift = static_cast<double>(mu) * (1.0 + 1e-9) - 1e-12;
    SquareMatrix m = b;
    for (int i = 0; i < n; ++i) m.set(i, i, b(i, i) - shift);
    SquareMatrix inv(n);
    try {
      inv = inverse(m);
    } catch (const Error&) {
      continue;
    }
    Vec6 x{};
    for (int i = 0; i < n; ++i) x[i] = 1.0 + 0.1 * i;
    for (int it = 0; it < 4; ++it) {
      Vec6 y{};
      inv.apply(std::span<const double>(x.data(), n), std::span<double>(y.data(), n));
      const double r = norm(std::span<const double>(y.data(), n));
      if (!(r > 0.0) || !std::isfinite(r)) break;
      for (int i = 0; i < n; ++i) x[i] = y[i] / r;
    }
    if (std::isfinite(x[0])) out.push_back(x);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

double SingularSpectrum::product() const {
  double p = 1.0;
  for (double s : sigma) p *= s;
  return p;
}

SingularSpectrum singular_values(const SquareMatrix& a) {
  if (a.dim() == 2) {
    // |f_z| +- |f_zbar| in Wirtinger form; the small one via |det| / sigma_1
    // avoids the cancellation in the difference.
    const double e = 0.5 * (a(0, 0) + a(1, 1)), f = 0.5 * (a(0, 0) - a(1, 1));
    const double g = 0.5 * (a(1, 0) + a(0, 1)), h = 0.5 * (a(1, 0) - a(0, 1));
    const double s1 = std::hypot(e, h) + std::hypot(f, g);
    const double s2 = s1 > 0.0 ? std::abs(determinant(a)) / s1 : 0.0;
    return {Vector{s1, std::min(s1, s2)}};
  }
  return {jacobi_singular_values(a)};
}

double outer_distortion(const SquareMatrix& a) {
  const double det = determinant(a);
  if (!(det > 0.0)) throw Error(Errc::NonpositiveDeterminant, "det A = " + std::to_string(det));
  const auto sv = singular_values(a);
  double k = 1.0;
  for (std::size_t j = 1; j < sv.sigma.size(); ++j) k *= sv.sigma[0] / sv.sigma[j];
  return k;
}

double inner_distortion(const SquareMatrix& a) {
  const double det = determinant(a);
  if (!(det > 0.0)) throw Error(Errc::NonpositiveDeterminant, "det A = " + std::to_string(det));
  const auto sv = singular_values(a);
  const double last = sv.sigma.back();
  double k = 1.0;
  for (std::size_t j = 0; j + 1 < sv.sigma.size(); ++j) k *= sv.sigma[j] / last;
  return k;
}

double margin_objective(const SquareMatrix& a, std::span<const double> xi) {
  if (static_cast<int>(xi.size()) != a.dim()) throw Error(Errc::DimensionMismatch, "direction length");
  const double r = norm(xi);
  Vec6 u{};
  for (int i = 0; i < a.dim(); ++i) u[i] = xi[i] / r;
  const Objective g{a, a.dim(), 0.0};
  return g.value(u.data());
}

MarginResult inclusion_margin(const SquareMatrix& a, double resolution, bool certify) {
  if (!(resolution > 0.0)) throw Error(Errc::BadParam, "resolution must be positive");
  const int n = a.dim();
  if (certify && n > 3) {
    throw Error(Errc::CertificationUnavailable, "certified margins are available for n <= 3 only");
  }
  MarginResult out;
  if (a.is_zero()) {
    // 0 >= 0 holds for every xi.
    out.value = kInf;
    out.witness.assign(n, 0.0);
    out.witness[0] = 1.0;
    out.certified = certify;
    return out;
  }
  const double sigma1 = singular_values(a).largest();
  const Objective g{a, n, 1e-14 * sigma1};
  if (certify) return certify_margin(g, sigma1, resolution);

  long evals = 0;
  Candidate best;
  if (n == 2)
    best = margin_planar(g, evals);
  else if (n == 3)
    best = margin_sphere(g, evals);
  else
    best = margin_high_dim(g, evals);
  best = with_eigen_seeds(g, best, evals);
  best = newton_polish(g, best, evals);
  out.value = best.value;
  out.witness.assign(best.xi.begin(), best.xi.begin() + n);
  normalize(out.witness.data(), n);
  out.error_bound = resolution;
  out.evaluations = evals;
  return out;
}

void InclusionParams::validate() const {
  if (!(delta > -1.0 && delta <= 1.0)) throw Error(Errc::BadParam, "delta must lie in (-1, 1]");
  if (K && !(*K >= 1.0)) throw Error(Errc::BadParam, "K must be >= 1");
}

std::string_view to_string(Membership m) noexcept {
  switch (m) {
    case Membership::Inside: return "inside";
    case Membership::Boundary: return "boundary";
    case Membership::Outside: return "outside";
  }
  return "unknown";
}

Membership classify_margin(double margin, double delta, double band) {
  if (margin >= delta + band) return Membership::Inside;
  if (margin <= delta - band) return Membership::Outside;
  return Membership::Boundary;
}

InclusionVerdict in_cone(const SquareMatrix& a, const InclusionParams& params, double band, double resolution) {
  params.validate();
  if (!(band > 0.0)) throw Error(Errc::BadParam, "band must be positive");
  InclusionVerdict v;
  const auto m = inclusion_margin(a, resolution);
  v.margin = m.value;
  v.witness = m.witness;
  v.status = classify_margin(m.value, params.delta, band);
  if (params.K) {
    const double ko = outer_distortion(a);
    v.outer_distortion = ko;
    if (ko > *params.K * (1.0 + 1e-9)) v.status = Membership::Outside;
  }
  return v;
}

std::vector<long double> characteristic_polynomial(const SquareMatrix& a) {
  const int n = a.dim();
  // Coefficient of t^(n-k) is (-1)^k times the sum of k x k principal minors,
  // each expanded exactly over permutations.
  std::vector<long double> coeffs(n + 1, 0.0L);
  coeffs[0] = 1.0L;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    const int k = static_cast<int>(idx.size());
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    long double minor = 0.0L;
    do {
      int inversions = 0;
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
          if (perm[i] > perm[j]) ++inversions;
      long double term = (inversions % 2) ? -1.0L : 1.0L;
      for (int i = 0; i < k; ++i) term *= static_cast<long double>(a(idx[i], idx[perm[i]]));
      minor += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    coeffs[k] += (k % 2 ? -1.0L : 1.0L) * minor;
  }
  return coeffs;
}

bool has_negative_real_eigenvalue(const SquareMatrix& a) {
  constexpr long double kZeroBand = 1e-10L;
  const double scale = a.max_abs();
  if (scale == 0.0) throw Error(Errc::IllConditioned, "zero matrix: every eigenvalue is 0");
  // Roots of the scaled matrix are the eigenvalues divided by `scale`.
  const SquareMatrix b = a.scaled(1.0 / scale);
  const SturmChain chain(characteristic_polynomial(b));
  const long double cut = kZeroBand / scale;
  const int at_minus_inf = chain.changes_at_minus_infinity();
  const int at_neg = chain.changes_at(-cut);
  const int at_pos = chain.changes_at(cut);
  if (at_neg != at_pos || horner(chain.polys[0], -cut) == 0.0L) {
    throw Error(Errc::IllConditioned, "an eigenvalue lies within 1e-10 of zero");
  }
  return at_minus_inf - at_neg > 0;
}

SquareMatrix shift(const SquareMatrix& a, double lambda) {
  if (!(lambda > 0.0)) throw Error(Errc::BadParam, "lambda must be positive");
  SquareMatrix s = a;
  for (int i = 0; i < a.dim(); ++i) s.set(i, i, a(i, i) + lambda);
  return s;
}

double shift_distortion_constant(double delta, int n) {
  const double d = std::min(delta, 0.0);
  return std::pow(2.0 / std::sqrt(1.0 - d * d), n - 1);
}

ShiftBoundsReport evaluate_shift_bounds(const SquareMatrix& a, double delta, double lambda) {
  if (!(delta > -1.0)) throw Error(Errc::BadParam, "delta must exceed -1");
  const int n = a.dim();
  const double d = std::min(delta, 0.0);
  const double root = std::sqrt(1.0 - d * d);
  const SquareMatrix shifted = shift(a, lambda);

  ShiftBoundsReport r;
  r.constant = shift_distortion_constant(delta, n);
  r.det_shifted = determinant(shifted);

  const double ko = outer_distortion(a), ki = inner_distortion(a);
  const auto sv = singular_values(a);
  const auto svs = singular_values(shifted);
  // K_O and K_I of the shift need det > 0; the bounds themselves imply it,
  // so a failure here is reported as a violation rather than thrown.
  double ko_s = std::numeric_limits<double>::infinity(), ki_s = ko_s;
  if (r.det_shifted > 0.0) {
    ko_s = outer_distortion(shifted);
    ki_s = inner_distortion(shifted);
  }
  auto check = [](double slack) { return BoundCheck{slack >= -kShiftBoundSlack, slack}; };
  r.outer = check(1.0 - ko_s / (r.constant * ko));
  r.inner = check(1.0 - ki_s / (r.constant * ki));
  r.inverse_norm = check(svs.smallest() / (lambda * root) - 1.0);

  double worst = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    const double m = std::max(sv.sigma[j], lambda);
    const double lo = root * m, hi = 2.0 * m;
    worst = std::min({worst, (svs.sigma[j] - lo) / lo, (hi - svs.sigma[j]) / hi});
  }
  r.sandwich = check(worst);
  return r;
}

ShiftBoundsReport verify_shift_bounds(const SquareMatrix& a, double delta, double lambda) {
  if (!(delta > -1.0)) throw Error(Errc::BadParam, "delta must exceed -1");
  if (!(lambda > 0.0)) throw Error(Errc::BadParam, "lambda must be positive");
  const auto m = inclusion_margin(a);
  if (m.value < delta - 1e-12) {
    throw Error(Errc::NotInCone, "margin " + std::to_string(m.value) + " is below delta " + std::to_string(delta));
  }
  return evaluate_shift_bounds(a, delta, lambda);
}

ReverseTriangleResult reverse_triangle_check(std::span<const double> u, std::span<const double> v, double delta) {
  if (u.size() != v.size()) throw Error(Errc::DimensionMismatch, "vectors differ in length");
  if (!(delta > -1.0 && delta <= 0.0)) throw Error(Errc::BadParam, "delta must lie in (-1, 0]");
  const double nu = norm(u), nv = norm(v);
  if (dot(u, v) < delta * nu * nv) throw Error(Errc::HypothesisViolated, "<u,v> < delta |u||v|");
  Vector sum(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) sum[i] = u[i] + v[i];
  ReverseTriangleResult r;
  r.slack = norm(sum) - std::sqrt(1.0 - delta * delta) * std::max(nu, nv);
  r.holds = r.slack >= -1e-12 * std::max({nu, nv, 1.0});
  return r;
}

}  // namespace incl
