#pragma once

// Planar degree through winding numbers, branch detection through the
// topological index, and numerical probes of injectivity failure and of the
// lower rate |f(x) - f(a)| / |x - a| near a point.

#include <cstdint>
#include <iosfwd>
#include <optional>

#include "incl/mapping.hpp"

namespace incl {

struct WindingReport {
  long winding = 0;
  long samples_used = 0;
  double min_boundary_distance = 0.0;  ///< min |f(z) - target| on the circle
  double max_step = 0.0;               ///< largest argument increment, radians
};

inline constexpr long kWindingStartSamples = 256;
inline constexpr long kWindingMaxSamples = 1L << 20;

/// Winding number of f restricted to the circle |z - center| = radius about
/// `target`. The sample count starts at 256 and doubles until every
/// consecutive argument increment is below pi/2 and one further doubling
/// reproduces the same integer.
///
/// Throws TargetOnImage when |f(z) - target| < 1e-9 * radius somewhere on the
/// circle, Inconclusive when 2^20 samples do not suffice, and OutsideDomain
/// when the circle leaves the domain.
WindingReport winding_number(const PlaneMapping& f, Complex center, double radius, Complex target);

/// Topological index at `point`: the winding about f(point) at radii r, r/2
/// and r/4. Throws Inconclusive unless all three agree.
long index_at(const PlaneMapping& f, Complex point, double radius = 0.05);

struct CollisionWitness {
  Point x1, x2;
  double image_gap = 0.0;  ///< |f(x1) - f(x2)|
  double point_gap = 0.0;  ///< |x1 - x2|
};

/// Axis-aligned box inside a mapping's domain.
struct Box {
  Vector lo, hi;
};

/// A search that finds nothing proves nothing: `witness` is empty and the
/// budget actually spent is reported.
struct CollisionSearchResult {
  std::optional<CollisionWitness> witness;
  long pairs_tried = 0;
  long budget = 0;
};

inline constexpr double kCollisionSeparation = 1e-3;

/// Seeded random pairs in `region`, each refined by Levenberg-Marquardt on
/// f(x1) - f(x2). Returns the first pair with image gap <= tol and point gap
/// >= `separation`.
CollisionSearchResult collision_search(const Mapping& f, const Box& region, long pairs, std::uint64_t seed,
                                       double tol, double separation = kCollisionSeparation);

/// Witness for a known pair, if it meets the tolerance and separation.
std::optional<CollisionWitness> confirm_collision(const Mapping& f, std::span<const double> x1,
                                                  std::span<const double> x2, double tol,
                                                  double separation = kCollisionSeparation);

struct LiminfRow {
  double radius = 0.0;
  double min_ratio = 0.0;  ///< min over |x - a| = r of |f(x) - f(a)| / r
};

/// Minimum difference quotient on spheres of decreasing radius about `a`
/// (4096 directions: a uniform circle for n = 2, a Fibonacci sphere for
/// n = 3, seeded random directions above). Throws OutsideDomain when a
/// sphere leaves the domain and BadParam when radii are not decreasing.
std::vector<LiminfRow> liminf_probe(const Mapping& f, std::span<const double> a, std::span<const double> radii,
                                    int directions = 4096);

struct IntegrabilityRow {
  double h = 0.0;
  double integral = 0.0;   ///< I(h) = int_h^1 s^(n-2-q) ds
  double increment = 0.0;  ///< I(h) - I(previous cutoff), previous cutoff 1 for the first row
};

/// Exact partial integrals of the radial reduction of int s(x)^(-q) dx over
/// the unit ball. Throws BadParam unless n >= 2, q > 0 and the cutoffs are
/// strictly decreasing in (0, 1).
std::vector<IntegrabilityRow> radial_integrability(int n, double q, std::span<const double> cutoffs);

/// Cutoffs 2^-1, 2^-2, ..., 2^-count.
std::vector<double> dyadic_cutoffs(int count);

void write_liminf_csv(std::ostream& out, const std::vector<LiminfRow>& rows);
void write_integrability_csv(std::ostream& out, const std::vector<IntegrabilityRow>& rows);

}  // namespace incl
