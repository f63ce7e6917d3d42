#include "incl/degree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "incl/rng.hpp"

namespace incl {

namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct WindingPass {
  WindingReport report;
  bool resolved = false;
};

WindingPass winding_pass(const PlaneMapping& f, Complex center, double radius, Complex target, long samples) {
  std::vector<Complex> w(samples);
  double min_dist = std::numeric_limits<double>::infinity();
  for (long j = 0; j < samples; ++j) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(samples);
    const Complex z = center + std::polar(radius, t);
    if (!f.contains(z)) throw Error(Errc::OutsideDomain, f.id() + ": winding circle leaves the domain");
    w[j] = f.value(z) - target;
    min_dist = std::min(min_dist, std::abs(w[j]));
  }
  if (min_dist < 1e-9 * radius) {
    throw Error(Errc::TargetOnImage, "target lies on the image of the circle (distance " +
                                         std::to_string(min_dist) + ")");
  }
  CompensatedSum total;
  double max_step = 0.0;
  for (long j = 0; j < samples; ++j) {
    const Complex a = w[j], b = w[(j + 1) % samples];
    const Complex q = std::conj(a) * b;
    const double step = std::atan2(q.imag(), q.real());
    max_step = std::max(max_step, std::abs(step));
    total.add(step);
  }
  WindingPass pass;
  pass.report.winding = std::lround(total.value() / (2.0 * std::numbers::pi));
  pass.report.samples_used = samples;
  pass.report.min_boundary_distance = min_dist;
  pass.report.max_step = max_step;
  pass.resolved = max_step < std::numbers::pi / 2.0;
  return pass;
}

}  // namespace

WindingReport winding_number(const PlaneMapping& f, Complex center, double radius, Complex target) {
  if (!(radius > 0.0)) throw Error(Errc::BadParam, "radius must be positive");
  std::optional<WindingReport> candidate;
  for (long samples = kWindingStartSamples; samples <= kWindingMaxSamples; samples *= 2) {
    const WindingPass pass = winding_pass(f, center, radius, target, samples);
    if (!pass.resolved) {
      candidate.reset();
      continue;
    }
    if (candidate && candidate->winding == pass.report.winding) return *candidate;
    candidate = pass.report;
  }
  throw Error(Errc::Inconclusive, "winding number not resolved with 2^20 samples");
}

long index_at(const PlaneMapping& f, Complex point, double radius) {
  const Complex target = f.value(point);
  const long w0 = winding_number(f, point, radius, target).winding;
  const long w1 = winding_number(f, point, radius / 2.0, target).winding;
  const long w2 = winding_number(f, point, radius / 4.0, target).winding;
  if (w0 != w1 || w1 != w2) {
    throw Error(Errc::Inconclusive, "index did not stabilize: " + std::to_string(w0) + ", " + std::to_string(w1) +
                                        ", " + std::to_string(w2));
  }
  return w0;
}

// ---------------------------------------------------------------------------

namespace {

double distance(std::span<const double> a, std::span<const double> b) {
  Vector d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return norm(d);
}

Vector residual(const Mapping& f, std::span<const double> x1, std::span<const double> x2) {
  const Point y1 = f.eval(x1), y2 = f.eval(x2);
  Vector r(y1.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = y1[i] - y2[i];
  return r;
}

// Central differences, falling back to one-sided near the domain boundary.
std::vector<Vector> fd_columns(const Mapping& f, const Point& x, double h) {
  const int n = f.dim();
  std::vector<Vector> cols(n, Vector(n));
  const Point fx = f.eval(x);
  Point xp = x, xm = x;
  for (int c = 0; c < n; ++c) {
    xp[c] = x[c] + h;
    xm[c] = x[c] - h;
    const bool up = f.in_domain(xp), down = f.in_domain(xm);
    if (up && down) {
      const Point fp = f.eval(xp), fm = f.eval(xm);
      for (int r = 0; r < n; ++r) cols[c][r] = (fp[r] - fm[r]) / (2.0 * h);
    } else if (up) {
      const Point fp = f.eval(xp);
      for (int r = 0; r < n; ++r) cols[c][r] = (fp[r] - fx[r]) / h;
    } else if (down) {
      const Point fm = f.eval(xm);
      for (int r = 0; r < n; ++r) cols[c][r] = (fx[r] - fm[r]) / h;
    }
    xp[c] = xm[c] = x[c];
  }
  return cols;
}

std::optional<CollisionWitness> refine_pair(const Mapping& f, const Box& box, Point x1, Point x2, double tol,
                                            double separation) {
  const int n = f.dim();
  double mu = 1e-3;
  Vector r = residual(f, x1, x2);
  double rn = norm(r);
  for (int iter = 0; iter < 200; ++iter) {
    const double gap = distance(x1, x2);
    if (gap < separation) return std::nullopt;
    if (rn <= tol) return CollisionWitness{x1, x2, rn, gap};
    const auto j1 = fd_columns(f, x1, 1e-7);
    const auto j2 = fd_columns(f, x2, 1e-7);
    // Residual Jacobian is [J1, -J2]; M = J J^T is n x n.
    SquareMatrix m(n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double s = 0.0;
        for (int c = 0; c < n; ++c) s += j1[c][a] * j1[c][b] + j2[c][a] * j2[c][b];
        m.set(a, b, s);
      }
    bool improved = false;
    for (int attempt = 0; attempt < 30 && !improved; ++attempt) {
      SquareMatrix damped = m;
      for (int a = 0; a < n; ++a) damped.set(a, a, m(a, a) + mu);
      Vector y;
      try {
        y = inverse(damped) * r;
      } catch (const Error&) {
        mu *= 10.0;
        continue;
      }
      // Minimum-norm step -J^T y.
      Point t1 = x1, t2 = x2;
      for (int c = 0; c < n; ++c) {
        double s1 = 0.0, s2 = 0.0;
        for (int a = 0; a < n; ++a) {
          s1 += j1[c][a] * y[a];
          s2 += j2[c][a] * y[a];
        }
        t1[c] = std::clamp(x1[c] - s1, box.lo[c], box.hi[c]);
        t2[c] = std::clamp(x2[c] + s2, box.lo[c], box.hi[c]);
      }
      if (f.in_domain(t1) && f.in_domain(t2)) {
        const Vector tr = residual(f, t1, t2);
        const double trn = norm(tr);
        if (trn < rn) {
          x1 = std::move(t1);
          x2 = std::move(t2);
          r = tr;
          rn = trn;
          mu = std::max(mu / 3.0, 1e-15);
          improved = true;
          break;
        }
      }
      mu *= 4.0;
    }
    if (!improved) break;
  }
  const double gap = distance(x1, x2);
  if (rn <= tol && gap >= separation) return CollisionWitness{x1, x2, rn, gap};
  return std::nullopt;
}

}  // namespace

CollisionSearchResult collision_search(const Mapping& f, const Box& region, long pairs, std::uint64_t seed,
                                       double tol, double separation) {
  const int n = f.dim();
  if (static_cast<int>(region.lo.size()) != n || static_cast<int>(region.hi.size()) != n) {
    throw Error(Errc::BadParam, "search box dimension does not match the mapping");
  }
  if (pairs <= 0 || !(tol > 0.0)) throw Error(Errc::BadParam, "collision search needs pairs > 0 and tol > 0");
  const SplitMix64 root(seed);
  CollisionSearchResult result;
  result.budget = pairs;
  for (long p = 0; p < pairs; ++p) {
    SplitMix64 rng = root.split(static_cast<std::uint64_t>(p));
    result.pairs_tried = p + 1;
    Point x1(n), x2(n);
    bool placed = false;
    for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
      for (int i = 0; i < n; ++i) {
        x1[i] = rng.uniform(region.lo[i], region.hi[i]);
        x2[i] = rng.uniform(region.lo[i], region.hi[i]);
      }
      placed = f.in_domain(x1) && f.in_domain(x2);
    }
    if (!placed) continue;
    if (auto w = refine_pair(f, region, std::move(x1), std::move(x2), tol, separation)) {
      result.witness = std::move(w);
      return result;
    }
  }
  return result;
}

std::optional<CollisionWitness> confirm_collision(const Mapping& f, std::span<const double> x1,
                                                  std::span<const double> x2, double tol, double separation) {
  const double gap = norm(residual(f, x1, x2));
  const double sep = distance(x1, x2);
  if (gap <= tol && sep >= separation) return CollisionWitness{Point(x1.begin(), x1.end()), Point(x2.begin(), x2.end()), gap, sep};
  return std::nullopt;
}

// ---------------------------------------------------------------------------

std::vector<LiminfRow> liminf_probe(const Mapping& f, std::span<const double> a, std::span<const double> radii,
                                    int directions) {
  const int n = f.dim();
  if (static_cast<int>(a.size()) != n) throw Error(Errc::DimensionMismatch, "probe centre dimension");
  if (directions < 8) throw Error(Errc::BadParam, "too few probe directions");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] < radii[i - 1]))) {
      throw Error(Errc::BadParam, "radii must be positive and strictly decreasing");
    }
  }
  std::vector<Vector> dirs(directions, Vector(n));
  if (n == 2) {
    for (int j = 0; j < directions; ++j) {
      const double t = 2.0 * std::numbers::pi * j / directions;
      dirs[j] = {std::cos(t), std::sin(t)};
    }
  } else if (n == 3) {
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int j = 0; j < directions; ++j) {
      const double z = 1.0 - (2.0 * j + 1.0) / directions;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      dirs[j] = {r * std::cos(golden_angle * j), r * std::sin(golden_angle * j), z};
    }
  } else {
    SplitMix64 rng(0x6C696D696E66ULL);
    for (auto& d : dirs) {
      for (auto& c : d) c = rng.normal();
      const double r = norm(d);
      for (auto& c : d) c /= r;
    }
  }
  if (!f.in_domain(a)) throw Error(Errc::OutsideDomain, f.id() + ": probe centre outside the domain");
  const Point fa = f.eval(a);
  std::vector<LiminfRow> rows;
  for (double r : radii) {
    double best = std::numeric_limits<double>::infinity();
    Point x(n);
    for (const auto& d : dirs) {
      for (int i = 0; i < n; ++i) x[i] = a[i] + r * d[i];
      if (!f.in_domain(x)) throw Error(Errc::OutsideDomain, f.id() + ": probe sphere leaves the domain");
      const Point fx = f.eval(x);
      Vector diff(n);
      for (int i = 0; i < n; ++i) diff[i] = fx[i] - fa[i];
      best = std::min(best, norm(diff) / r);
    }
    rows.push_back({r, best});
  }
  return rows;
}

std::vector<IntegrabilityRow> radial_integrability(int n, double q, std::span<const double> cutoffs) {
  if (n < 2) throw Error(Errc::BadParam, "dimension must be >= 2");
  if (!(q > 0.0)) throw Error(Errc::BadParam, "q must be positive");
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    const double h = cutoffs[i];
    if (!(h > 0.0 && h < 1.0) || (i > 0 && !(h < cutoffs[i - 1]))) {
      throw Error(Errc::BadParam, "cutoffs must be strictly decreasing in (0, 1)");
    }
  }
  // Integrand s^(n-2) * s^(-q): area element of the first n-1 coordinates
  // times the distortion weight.
  const double p = static_cast<double>(n - 2) - q;
  const bool logarithmic = p == -1.0;
  std::vector<IntegrabilityRow> rows;
  double previous = 1.0;
  for (double h : cutoffs) {
    IntegrabilityRow row;
    row.h = h;
    if (logarithmic) {
      row.integral = -std::log(h);
      row.increment = std::log(previous / h);
    } else {
      const double e = p + 1.0;
      row.integral = (1.0 - std::pow(h, e)) / e;
      row.increment = (std::pow(previous, e) - std::pow(h, e)) / e;
    }
    rows.push_back(row);
    previous = h;
  }
  return rows;
}

std::vector<double> dyadic_cutoffs(int count) {
  std::vector<double> h;
  for (int i = 1; i <= count; ++i) h.push_back(std::ldexp(1.0, -i));
  return h;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_liminf_csv(std::ostream& out, const std::vector<LiminfRow>& rows) {
  out << "r,min_ratio\n";
  for (const auto& r : rows) out << fmt(r.radius) << ',' << fmt(r.min_ratio) << '\n';
}

void write_integrability_csv(std::ostream& out, const std::vector<IntegrabilityRow>& rows) {
  out << "h,I,increment\n";
  for (const auto& r : rows) out << fmt(r.h) << ',' << fmt(r.integral) << ',' << fmt(r.increment) << '\n';
}

}  // namespace incl
