#pragma once

// Closed-form mappings with exact derivatives: the branched planar examples,
// the z^(5/2) half-plane map, the collapsing ball map, and the shift
// f(x) + lambda x applied to any of them.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "incl/planar.hpp"

namespace incl {

using Point = std::vector<double>;

/// A mapping between open subsets of R^n with an exact Jacobian off a
/// measure-zero set of interfaces.
class Mapping {
 public:
  virtual ~Mapping() = default;

  virtual std::string id() const = 0;
  virtual int dim() const = 0;
  virtual bool in_domain(std::span<const double> x) const = 0;
  /// Throws OutsideDomain outside the domain.
  virtual Point eval(std::span<const double> x) const = 0;
  /// Exact Jacobian; throws where it is undefined (OnSingularAxis) or
  /// outside the domain.
  virtual SquareMatrix jacobian(std::span<const double> x) const = 0;
  virtual std::string region(std::span<const double> x) const = 0;
  /// Distance to the set where the Jacobian is undefined or jumps
  /// (+inf when there is none).
  virtual double interface_distance(std::span<const double> x) const = 0;
};

/// Planar mapping expressed in complex notation. The real-vector interface
/// of `Mapping` is derived from the complex one.
class PlaneMapping : public Mapping {
 public:
  virtual bool contains(Complex z) const = 0;
  virtual Complex value(Complex z) const = 0;
  virtual ComplexDerivatives derivatives(Complex z) const = 0;
  virtual std::string region_at(Complex z) const = 0;
  virtual double interface_distance_at(Complex z) const = 0;

  int dim() const final { return 2; }
  bool in_domain(std::span<const double> x) const final;
  Point eval(std::span<const double> x) const final;
  SquareMatrix jacobian(std::span<const double> x) const final;
  std::string region(std::span<const double> x) const final;
  double interface_distance(std::span<const double> x) const final;

 protected:
  void require_domain(Complex z) const;
};

class SpaceMapping : public Mapping {};

using PlaneMappingPtr = std::shared_ptr<const PlaneMapping>;
using SpaceMappingPtr = std::shared_ptr<const SpaceMapping>;

/// f(z) = alpha z + beta conj(z).
class LinearPlaneMap final : public PlaneMapping {
 public:
  LinearPlaneMap(std::string id, Complex alpha, Complex beta);

  std::string id() const override { return id_; }
  bool contains(Complex) const override { return true; }
  Complex value(Complex z) const override { return alpha_ * z + beta_ * std::conj(z); }
  ComplexDerivatives derivatives(Complex) const override { return {alpha_, beta_}; }
  std::string region_at(Complex) const override { return "PLANE"; }
  double interface_distance_at(Complex) const override;

 private:
  std::string id_;
  Complex alpha_, beta_;
};

PlaneMappingPtr identity_map();
PlaneMappingPtr conjugation_map();
PlaneMappingPtr rotation_map(double theta);

/// Quadratic fold a z^2 + b conj(z)^2 on the closed first quadrant with
/// a = sqrt(1-k^2) + ik, b = -ik, reflected to the fourth quadrant by
/// f(z) = conj(f(conj z)) and to the left half-plane by f(z) = f(-z).
/// Interfaces are the coordinate axes; regions Q1, Q4, LEFT, AXIS.
class FoldMapping final : public PlaneMapping {
 public:
  explicit FoldMapping(double k);

  std::string id() const override { return "case1"; }
  bool contains(Complex) const override { return true; }
  Complex value(Complex z) const override;
  ComplexDerivatives derivatives(Complex z) const override;
  std::string region_at(Complex z) const override;
  double interface_distance_at(Complex z) const override;

  double k() const { return k_; }
  Complex a() const { return a_; }
  Complex b() const { return b_; }

 private:
  Complex right_value(Complex z) const;
  ComplexDerivatives right_derivatives(Complex z) const;

  double k_;
  Complex a_, b_;
};

/// Throws BadParam unless 0 <= k <= 1/sqrt(2).
std::shared_ptr<const FoldMapping> branchex_case1(double k);

/// Sector/linear map on the closed upper half-plane,
///   2 z^2 / (|z| sqrt(1 + d^2))   where re z >= -d im z,
///   (i - eps) z - i conj(z)       where re z <= -d im z,
/// with d = eps / (2 + sqrt(4 - eps^2)), reflected by f(z) = conj(f(conj z)).
/// Interfaces are the two rays re z = -+d im z and the negative real axis.
class SectorMapping final : public PlaneMapping {
 public:
  explicit SectorMapping(double epsilon);

  std::string id() const override { return "case2"; }
  bool contains(Complex) const override { return true; }
  Complex value(Complex z) const override;
  ComplexDerivatives derivatives(Complex z) const override;
  std::string region_at(Complex z) const override;
  double interface_distance_at(Complex z) const override;

  Complex sector_clause(Complex z) const;
  Complex linear_clause(Complex z) const;

  double epsilon() const { return eps_; }
  /// Quasiregularity constant 1 / sqrt(1 + eps^2).
  double k() const { return k_; }
  /// Slope d of the clause interface.
  double slope() const { return d_; }

 private:
  Complex upper_value(Complex z) const;
  ComplexDerivatives upper_derivatives(Complex z) const;

  double eps_, k_, d_, c_;
};

/// Throws BadParam unless 0 < eps < 1.
std::shared_ptr<const SectorMapping> branchex_case2(double epsilon);

/// Principal z^(5/2) on the open right half-plane.
class PowerHalfPlane final : public PlaneMapping {
 public:
  std::string id() const override { return "power52"; }
  bool contains(Complex z) const override { return z.real() > 0.0; }
  Complex value(Complex z) const override;
  ComplexDerivatives derivatives(Complex z) const override;
  std::string region_at(Complex) const override { return "RIGHT"; }
  double interface_distance_at(Complex) const override;
};

PlaneMappingPtr power_half_plane();

/// f(z)^2, used for degree multiplicativity checks.
class SquaredPlaneMap final : public PlaneMapping {
 public:
  explicit SquaredPlaneMap(PlaneMappingPtr base) : base_(std::move(base)) {}

  std::string id() const override { return base_->id() + "^2"; }
  bool contains(Complex z) const override { return base_->contains(z); }
  Complex value(Complex z) const override;
  ComplexDerivatives derivatives(Complex z) const override;
  std::string region_at(Complex z) const override { return base_->region_at(z); }
  double interface_distance_at(Complex z) const override { return base_->interface_distance_at(z); }

 private:
  PlaneMappingPtr base_;
};

/// f(z) + lambda z; f_z gains lambda, f_zbar is unchanged.
class RegularizedPlaneMap final : public PlaneMapping {
 public:
  RegularizedPlaneMap(PlaneMappingPtr base, double lambda);

  std::string id() const override;
  bool contains(Complex z) const override { return base_->contains(z); }
  Complex value(Complex z) const override { return base_->value(z) + lambda_ * z; }
  ComplexDerivatives derivatives(Complex z) const override;
  std::string region_at(Complex z) const override { return base_->region_at(z); }
  double interface_distance_at(Complex z) const override { return base_->interface_distance_at(z); }

  double lambda() const { return lambda_; }

 private:
  PlaneMappingPtr base_;
  double lambda_;
};

/// (x_1, ..., x_{n-1}, eps s(x) x_n) on the open unit ball, with
/// s(x) = |(x_1, ..., x_{n-1})|. The Jacobian is undefined on the x_n axis.
class BallMapping final : public SpaceMapping {
 public:
  static constexpr double kAxisCutoff = 1e-14;

  BallMapping(int n, double epsilon);

  std::string id() const override { return "ball"; }
  int dim() const override { return n_; }
  bool in_domain(std::span<const double> x) const override;
  Point eval(std::span<const double> x) const override;
  SquareMatrix jacobian(std::span<const double> x) const override;
  std::string region(std::span<const double> x) const override;
  double interface_distance(std::span<const double> x) const override;

  double epsilon() const { return eps_; }
  static double axis_distance(std::span<const double> x);

 private:
  void require_domain(std::span<const double> x) const;

  int n_;
  double eps_;
};

/// Throws BadParam unless 2 <= n <= 6 and 0 < eps < 1.
std::shared_ptr<const BallMapping> ball_example(int n, double epsilon);

class RegularizedSpaceMap final : public SpaceMapping {
 public:
  RegularizedSpaceMap(SpaceMappingPtr base, double lambda);

  std::string id() const override;
  int dim() const override { return base_->dim(); }
  bool in_domain(std::span<const double> x) const override { return base_->in_domain(x); }
  Point eval(std::span<const double> x) const override;
  SquareMatrix jacobian(std::span<const double> x) const override;
  std::string region(std::span<const double> x) const override { return base_->region(x); }
  double interface_distance(std::span<const double> x) const override { return base_->interface_distance(x); }

 private:
  SpaceMappingPtr base_;
  double lambda_;
};

/// f + lambda * id. Throws BadParam unless lambda > 0.
PlaneMappingPtr regularize(PlaneMappingPtr f, double lambda);
SpaceMappingPtr regularize(SpaceMappingPtr f, double lambda);

// ---------------------------------------------------------------------------

/// Central differences with step h.
SquareMatrix finite_difference_jacobian(const Mapping& f, std::span<const double> x, double h = 1e-6);

/// max |J_fd - J| / max(max|J|, 1e-12).
double finite_difference_error(const Mapping& f, std::span<const double> x, double h = 1e-6);

struct MonotonicityResult {
  bool holds = false;
  /// <f(a)-f(b), a-b> / (|f(a)-f(b)| |a-b|), 0 when either factor vanishes.
  double ratio = 0.0;
};

/// <f(a)-f(b), a-b> >= delta |f(a)-f(b)| |a-b|. Throws OutsideDomain when an
/// endpoint is outside the (convex) domain.
MonotonicityResult monotonicity_check(const Mapping& f, std::span<const double> a, std::span<const double> b,
                                      double delta);

struct GridSpec {
  Vector lo, hi;            ///< bounding box
  std::vector<int> counts;  ///< cells per axis, >= 2
  double exclusion = 1e-3;  ///< tube around interfaces skipped in aggregates
  std::uint64_t seed = 0;   ///< jitter stream
  double jitter = 0.0;      ///< fraction of a cell, in [0, 1]

  /// Throws BadParam on mismatched sizes, counts < 2 or negative exclusion.
  void validate(int dim) const;
  /// Square box [-half, half]^dim with `per_axis` cells per axis.
  static GridSpec box(int dim, double half, int per_axis, double exclusion = 1e-3, std::uint64_t seed = 0,
                      double jitter = 0.0);
};

struct FieldSample {
  Point x;
  Point value;
  std::optional<SquareMatrix> jacobian;  ///< empty when excluded
  std::string region;
  double margin = std::numeric_limits<double>::quiet_NaN();
  double outer_distortion = std::numeric_limits<double>::quiet_NaN();
  bool excluded = false;
};

/// Cell-centred lattice over the grid box (jittered when requested). Points
/// outside the domain are dropped; points within `exclusion` of an interface
/// are kept but tagged `excluded` and carry no derivative data.
std::vector<FieldSample> sample_field(const Mapping& f, const GridSpec& grid);

struct FieldSummary {
  long points = 0;
  long excluded = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  double max_outer_distortion = 0.0;
  long nonpositive_jacobian = 0;
};

FieldSummary summarize(const std::vector<FieldSample>& samples);

/// `x,y[,z...],f1,f2[,f3...],region,margin,KO`, one row per sample.
void write_field_csv(std::ostream& out, const std::vector<FieldSample>& samples);
/// One JSON object per line.
void write_field_jsonl(std::ostream& out, const std::vector<FieldSample>& samples);

}  // namespace incl
