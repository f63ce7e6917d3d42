#include "incl/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "json.hpp"

#include "incl/rng.hpp"

namespace incl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const Complex kI(0.0, 1.0);

Complex to_z(std::span<const double> x) {
  if (x.size() != 2) throw Error(Errc::DimensionMismatch, "planar mapping expects a 2-vector");
  return {x[0], x[1]};
}

// Distance from p to the ray {t d : t >= 0}, d a unit vector.
double ray_distance(Complex p, Complex d) {
  const double proj = p.real() * d.real() + p.imag() * d.imag();
  if (proj <= 0.0) return std::abs(p);
  return std::abs(p - proj * d);
}

ComplexDerivatives reflect_derivatives(const ComplexDerivatives& d) {
  // g(z) = conj(f(conj z)) has g_z = conj(f_z(conj z)), g_zbar = conj(f_zbar(conj z)).
  return {std::conj(d.fz), std::conj(d.fzbar)};
}

}  // namespace

// ---------------------------------------------------------------------------
// PlaneMapping adapters

void PlaneMapping::require_domain(Complex z) const {
  if (!contains(z)) throw Error(Errc::OutsideDomain, id() + ": point outside the domain");
}

bool PlaneMapping::in_domain(std::span<const double> x) const { return contains(to_z(x)); }

Point PlaneMapping::eval(std::span<const double> x) const {
  const Complex z = to_z(x);
  require_domain(z);
  const Complex w = value(z);
  return {w.real(), w.imag()};
}

SquareMatrix PlaneMapping::jacobian(std::span<const double> x) const {
  const Complex z = to_z(x);
  require_domain(z);
  return from_complex(derivatives(z));
}

std::string PlaneMapping::region(std::span<const double> x) const { return region_at(to_z(x)); }

double PlaneMapping::interface_distance(std::span<const double> x) const {
  return interface_distance_at(to_z(x));
}

// ---------------------------------------------------------------------------
// Linear maps

LinearPlaneMap::LinearPlaneMap(std::string id, Complex alpha, Complex beta)
    : id_(std::move(id)), alpha_(alpha), beta_(beta) {}

double LinearPlaneMap::interface_distance_at(Complex) const { return kInf; }

PlaneMappingPtr identity_map() { return std::make_shared<LinearPlaneMap>("identity", 1.0, 0.0); }

PlaneMappingPtr conjugation_map() { return std::make_shared<LinearPlaneMap>("conjugation", 0.0, 1.0); }

PlaneMappingPtr rotation_map(double theta) {
  return std::make_shared<LinearPlaneMap>("rotation", std::polar(1.0, theta), 0.0);
}

// ---------------------------------------------------------------------------
// Fold (first branched example)

FoldMapping::FoldMapping(double k) : k_(k) {
  if (!(k >= 0.0 && k <= 1.0 / std::sqrt(2.0))) throw Error(Errc::BadParam, "fold map needs 0 <= k <= 1/sqrt(2)");
  a_ = Complex(std::sqrt((1.0 - k) * (1.0 + k)), k);
  b_ = Complex(0.0, -k);
}

Complex FoldMapping::right_value(Complex z) const {
  if (z.imag() >= 0.0) {
    const Complex zb = std::conj(z);
    return a_ * (z * z) + b_ * (zb * zb);
  }
  return std::conj(right_value(std::conj(z)));
}

ComplexDerivatives FoldMapping::right_derivatives(Complex z) const {
  if (z.imag() >= 0.0) return {2.0 * a_ * z, 2.0 * b_ * std::conj(z)};
  return reflect_derivatives(right_derivatives(std::conj(z)));
}

Complex FoldMapping::value(Complex z) const { return z.real() < 0.0 ? right_value(-z) : right_value(z); }

ComplexDerivatives FoldMapping::derivatives(Complex z) const {
  if (z.real() < 0.0) {
    // g(z) = f(-z): g_z = -f_z(-z), g_zbar = -f_zbar(-z).
    const auto d = right_derivatives(-z);
    return {-d.fz, -d.fzbar};
  }
  return right_derivatives(z);
}

std::string FoldMapping::region_at(Complex z) const {
  if (z.real() == 0.0 || z.imag() == 0.0) return "AXIS";
  if (z.real() < 0.0) return "LEFT";
  return z.imag() > 0.0 ? "Q1" : "Q4";
}

double FoldMapping::interface_distance_at(Complex z) const {
  return std::min(std::abs(z.real()), std::abs(z.imag()));
}

std::shared_ptr<const FoldMapping> branchex_case1(double k) { return std::make_shared<FoldMapping>(k); }

// ---------------------------------------------------------------------------
// Sector map (second branched example)

SectorMapping::SectorMapping(double epsilon) : eps_(epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(Errc::BadParam, "sector map needs 0 < eps < 1");
  k_ = 1.0 / std::sqrt(1.0 + eps_ * eps_);
  d_ = eps_ / (2.0 + std::sqrt(4.0 - eps_ * eps_));
  c_ = std::sqrt(1.0 + d_ * d_);
}

Complex SectorMapping::sector_clause(Complex z) const {
  const double r = std::abs(z);
  if (r == 0.0) return 0.0;
  return 2.0 * (z * z) / (r * c_);
}

Complex SectorMapping::linear_clause(Complex z) const { return (kI - eps_) * z - kI * std::conj(z); }

Complex SectorMapping::upper_value(Complex z) const {
  return z.real() >= -d_ * z.imag() ? sector_clause(z) : linear_clause(z);
}

ComplexDerivatives SectorMapping::upper_derivatives(Complex z) const {
  if (z.real() >= -d_ * z.imag()) {
    // z^2/|z| has d/dz = (3/2) z/|z| and d/dzbar = -z^3 / (2|z|^3).
    const double r = std::abs(z);
    const Complex u = z / r;
    return {3.0 * u / c_, -(u * u * u) / c_};
  }
  return {kI - eps_, -kI};
}

Complex SectorMapping::value(Complex z) const {
  if (z.imag() >= 0.0) return upper_value(z);
  return std::conj(upper_value(std::conj(z)));
}

ComplexDerivatives SectorMapping::derivatives(Complex z) const {
  if (z == 0.0) throw Error(Errc::OnSingularAxis, "case2: derivative undefined at the origin");
  if (z.imag() >= 0.0) return upper_derivatives(z);
  return reflect_derivatives(upper_derivatives(std::conj(z)));
}

std::string SectorMapping::region_at(Complex z) const {
  if (interface_distance_at(z) == 0.0) return "INTERFACE";
  const bool upper = z.imag() >= 0.0;
  const Complex w = upper ? z : std::conj(z);
  const bool sector = w.real() >= -d_ * w.imag();
  return std::string(sector ? "SECTOR_" : "LINEAR_") + (upper ? "UPPER" : "LOWER");
}

double SectorMapping::interface_distance_at(Complex z) const {
  const Complex up = Complex(-d_, 1.0) / c_;
  const Complex down = Complex(-d_, -1.0) / c_;
  return std::min({ray_distance(z, up), ray_distance(z, down), ray_distance(z, Complex(-1.0, 0.0))});
}

std::shared_ptr<const SectorMapping> branchex_case2(double epsilon) {
  return std::make_shared<SectorMapping>(epsilon);
}

// ---------------------------------------------------------------------------
// z^(5/2)

Complex PowerHalfPlane::value(Complex z) const {
  require_domain(z);
  return std::pow(z, 2.5);
}

ComplexDerivatives PowerHalfPlane::derivatives(Complex z) const {
  require_domain(z);
  return {2.5 * std::pow(z, 1.5), 0.0};
}

double PowerHalfPlane::interface_distance_at(Complex) const { return kInf; }

PlaneMappingPtr power_half_plane() { return std::make_shared<PowerHalfPlane>(); }

// ---------------------------------------------------------------------------
// Derived planar maps

Complex SquaredPlaneMap::value(Complex z) const {
  const Complex w = base_->value(z);
  return w * w;
}

ComplexDerivatives SquaredPlaneMap::derivatives(Complex z) const {
  const Complex w = base_->value(z);
  const auto d = base_->derivatives(z);
  return {2.0 * w * d.fz, 2.0 * w * d.fzbar};
}

RegularizedPlaneMap::RegularizedPlaneMap(PlaneMappingPtr base, double lambda)
    : base_(std::move(base)), lambda_(lambda) {
  if (!base_) throw Error(Errc::BadParam, "null mapping");
  if (!(lambda > 0.0)) throw Error(Errc::BadParam, "lambda must be positive");
}

std::string RegularizedPlaneMap::id() const { return base_->id() + "+lambda"; }

ComplexDerivatives RegularizedPlaneMap::derivatives(Complex z) const {
  const auto d = base_->derivatives(z);
  return {d.fz + lambda_, d.fzbar};
}

PlaneMappingPtr regularize(PlaneMappingPtr f, double lambda) {
  return std::make_shared<RegularizedPlaneMap>(std::move(f), lambda);
}

// ---------------------------------------------------------------------------
// Ball map

BallMapping::BallMapping(int n, double epsilon) : n_(n), eps_(epsilon) {
  if (n < SquareMatrix::kMinDim || n > SquareMatrix::kMaxDim) throw Error(Errc::BadParam, "ball map needs 2 <= n <= 6");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(Errc::BadParam, "ball map needs 0 < eps < 1");
}

double BallMapping::axis_distance(std::span<const double> x) {
  return norm(x.first(x.size() - 1));
}

bool BallMapping::in_domain(std::span<const double> x) const {
  return static_cast<int>(x.size()) == n_ && norm(x) < 1.0;
}

void BallMapping::require_domain(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) throw Error(Errc::DimensionMismatch, "ball map point dimension");
  if (!(norm(x) < 1.0)) throw Error(Errc::OutsideDomain, "ball map: |x| >= 1");
}

Point BallMapping::eval(std::span<const double> x) const {
  require_domain(x);
  Point y(x.begin(), x.end());
  y[n_ - 1] = eps_ * axis_distance(x) * x[n_ - 1];
  return y;
}

SquareMatrix BallMapping::jacobian(std::span<const double> x) const {
  require_domain(x);
  const double s = axis_distance(x);
  if (s < kAxisCutoff) throw Error(Errc::OnSingularAxis, "ball map: Jacobian undefined on the x_n axis");
  SquareMatrix j(n_);
  for (int i = 0; i < n_ - 1; ++i) j.set(i, i, 1.0);
  const double xn = x[n_ - 1];
  for (int c = 0; c < n_ - 1; ++c) j.set(n_ - 1, c, eps_ * x[c] * xn / s);
  j.set(n_ - 1, n_ - 1, eps_ * s);
  return j;
}

std::string BallMapping::region(std::span<const double> x) const {
  return axis_distance(x) < kAxisCutoff ? "AXIS" : "BALL";
}

double BallMapping::interface_distance(std::span<const double> x) const { return axis_distance(x); }

std::shared_ptr<const BallMapping> ball_example(int n, double epsilon) {
  return std::make_shared<BallMapping>(n, epsilon);
}

RegularizedSpaceMap::RegularizedSpaceMap(SpaceMappingPtr base, double lambda)
    : base_(std::move(base)), lambda_(lambda) {
  if (!base_) throw Error(Errc::BadParam, "null mapping");
  if (!(lambda > 0.0)) throw Error(Errc::BadParam, "lambda must be positive");
}

std::string RegularizedSpaceMap::id() const { return base_->id() + "+lambda"; }

Point RegularizedSpaceMap::eval(std::span<const double> x) const {
  Point y = base_->eval(x);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += lambda_ * x[i];
  return y;
}

SquareMatrix RegularizedSpaceMap::jacobian(std::span<const double> x) const {
  return shift(base_->jacobian(x), lambda_);
}

SpaceMappingPtr regularize(SpaceMappingPtr f, double lambda) {
  return std::make_shared<RegularizedSpaceMap>(std::move(f), lambda);
}

// ---------------------------------------------------------------------------
// Cross-checks

SquareMatrix finite_difference_jacobian(const Mapping& f, std::span<const double> x, double h) {
  const int n = f.dim();
  SquareMatrix j(n);
  Point xp(x.begin(), x.end()), xm(x.begin(), x.end());
  for (int c = 0; c < n; ++c) {
    xp[c] = x[c] + h;
    xm[c] = x[c] - h;
    const Point fp = f.eval(xp), fm = f.eval(xm);
    for (int r = 0; r < n; ++r) j.set(r, c, (fp[r] - fm[r]) / (2.0 * h));
    xp[c] = xm[c] = x[c];
  }
  return j;
}

double finite_difference_error(const Mapping& f, std::span<const double> x, double h) {
  const SquareMatrix exact = f.jacobian(x);
  const SquareMatrix fd = finite_difference_jacobian(f, x, h);
  return (fd - exact).max_abs() / std::max(exact.max_abs(), 1e-12);
}

MonotonicityResult monotonicity_check(const Mapping& f, std::span<const double> a, std::span<const double> b,
                                      double delta) {
  if (!f.in_domain(a) || !f.in_domain(b)) throw Error(Errc::OutsideDomain, f.id() + ": segment endpoint outside");
  const Point fa = f.eval(a), fb = f.eval(b);
  Vector df(fa.size()), dx(a.size());
  for (std::size_t i = 0; i < df.size(); ++i) {
    df[i] = fa[i] - fb[i];
    dx[i] = a[i] - b[i];
  }
  const double inner = dot(df, dx);
  const double scale = norm(df) * norm(dx);
  MonotonicityResult r;
  r.holds = inner >= delta * scale;
  r.ratio = scale > 0.0 ? inner / scale : 0.0;
  return r;
}

void GridSpec::validate(int dim) const {
  if (static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim ||
      static_cast<int>(counts.size()) != dim) {
    throw Error(Errc::BadParam, "grid dimension does not match the mapping");
  }
  for (int d = 0; d < dim; ++d) {
    if (counts[d] < 2) throw Error(Errc::BadParam, "grid counts must be >= 2");
    if (!(hi[d] > lo[d])) throw Error(Errc::BadParam, "grid box is empty");
  }
  if (!(exclusion >= 0.0)) throw Error(Errc::BadParam, "exclusion must be >= 0");
  if (!(jitter >= 0.0 && jitter <= 1.0)) throw Error(Errc::BadParam, "jitter must lie in [0, 1]");
}

GridSpec GridSpec::box(int dim, double half, int per_axis, double exclusion, std::uint64_t seed, double jitter) {
  return GridSpec{Vector(dim, -half), Vector(dim, half), std::vector<int>(dim, per_axis), exclusion, seed, jitter};
}

std::vector<FieldSample> sample_field(const Mapping& f, const GridSpec& grid) {
  const int n = f.dim();
  grid.validate(n);
  SplitMix64 rng(grid.seed);
  std::vector<int> idx(n, 0);
  std::vector<FieldSample> out;
  long total = 1;
  for (int c : grid.counts) total *= c;
  out.reserve(static_cast<std::size_t>(total));
  for (long k = 0; k < total; ++k) {
    Point x(n);
    for (int d = 0; d < n; ++d) {
      const double h = (grid.hi[d] - grid.lo[d]) / grid.counts[d];
      const double shake = grid.jitter > 0.0 ? grid.jitter * (rng.uniform() - 0.5) : 0.0;
      x[d] = grid.lo[d] + (idx[d] + 0.5 + shake) * h;
    }
    for (int d = n - 1; d >= 0; --d) {
      if (++idx[d] < grid.counts[d]) break;
      idx[d] = 0;
    }
    if (!f.in_domain(x)) continue;
    FieldSample s;
    s.value = f.eval(x);
    s.region = f.region(x);
    s.excluded = f.interface_distance(x) < grid.exclusion;
    if (!s.excluded) {
      const SquareMatrix j = f.jacobian(x);
      s.margin = inclusion_margin(j).value;
      if (determinant(j) > 0.0) s.outer_distortion = outer_distortion(j);
      s.jacobian = j;
    }
    s.x = std::move(x);
    out.push_back(std::move(s));
  }
  return out;
}

FieldSummary summarize(const std::vector<FieldSample>& samples) {
  FieldSummary s;
  for (const auto& p : samples) {
    ++s.points;
    if (p.excluded) {
      ++s.excluded;
      continue;
    }
    s.min_margin = std::min(s.min_margin, p.margin);
    if (std::isnan(p.outer_distortion))
      ++s.nonpositive_jacobian;
    else
      s.max_outer_distortion = std::max(s.max_outer_distortion, p.outer_distortion);
  }
  return s;
}

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* kAxisNames[] = {"x", "y", "z", "w", "v", "u"};

}  // namespace

void write_field_csv(std::ostream& out, const std::vector<FieldSample>& samples) {
  const int n = samples.empty() ? 2 : static_cast<int>(samples.front().x.size());
  for (int d = 0; d < n; ++d) out << kAxisNames[d] << ',';
  for (int d = 0; d < n; ++d) out << 'f' << d + 1 << ',';
  out << "region,margin,KO\n";
  for (const auto& s : samples) {
    for (double v : s.x) out << fmt(v) << ',';
    for (double v : s.value) out << fmt(v) << ',';
    out << s.region << ',' << fmt(s.margin) << ',' << fmt(s.outer_distortion) << '\n';
  }
}

void write_field_jsonl(std::ostream& out, const std::vector<FieldSample>& samples) {
  for (const auto& s : samples) {
    nlohmann::json j;
    j["point"] = s.x;
    j["value"] = s.value;
    j["region"] = s.region;
    j["excluded"] = s.excluded;
    j["margin"] = s.excluded || std::isinf(s.margin) ? nlohmann::json(nullptr) : nlohmann::json(s.margin);
    j["KO"] = std::isnan(s.outer_distortion) ? nlohmann::json(nullptr) : nlohmann::json(s.outer_distortion);
    if (s.jacobian) j["jacobian"] = s.jacobian->rows();
    out << j.dump() << '\n';
  }
}

}  // namespace incl
