#pragma once

// Singular values, distortion functionals, the angular cone margin and the
// bounds satisfied by the shifted matrix A + lambda I.
//
// The cone of level delta is the set of n x n matrices A with
//   <A xi, xi> >= delta |A xi| |xi|   for every xi,
// and the margin m(A) is the largest delta for which A belongs to it.

#include <optional>
#include <string_view>

#include "incl/matrix.hpp"

namespace incl {

/// Singular values in nonincreasing order.
struct SingularSpectrum {
  Vector sigma;

  double largest() const { return sigma.front(); }
  double smallest() const { return sigma.back(); }
  double product() const;
};

SingularSpectrum singular_values(const SquareMatrix& a);

/// sigma_1^n / (sigma_1 ... sigma_n). Throws NonpositiveDeterminant when
/// det A <= 0.
double outer_distortion(const SquareMatrix& a);
/// (sigma_1 ... sigma_n) / sigma_n^n. Same error contract.
double inner_distortion(const SquareMatrix& a);

// ---------------------------------------------------------------------------
// Cone margin

struct MarginResult {
  double value = 0.0;     ///< m(A); +inf for the zero matrix
  Vector witness;         ///< unit vector attaining (approximately) the margin
  double error_bound = 0.0;  ///< rigorous when `certified`, else the resolution
  bool certified = false;
  long evaluations = 0;
};

inline constexpr double kDefaultMarginResolution = 1e-9;

/// inf over unit xi with A xi != 0 of <A xi, xi> / |A xi|.
///
/// Uncertified mode: dense angular grid plus golden-section refinement for
/// n = 2, Fibonacci sphere plus projected-gradient polishing for n = 3, and
/// 64 polished restarts for n > 3. Eigenvectors of negative real
/// eigenvalues are always tried as seeds, and for n >= 3 the best point gets
/// a damped Newton finish. Directions with |A xi| < 1e-14 ||A|| are skipped
/// since the defining inequality is vacuous there.
///
/// Certified mode (n <= 3) runs a Lipschitz branch-and-bound over the sphere
/// using |grad g| <= 3 ||A|| / |A xi|; the returned `error_bound` is a
/// rigorous bound on |value - m(A)| and is at most `resolution`. Throws
/// CertificationUnavailable for n > 3, or when the evaluation budget runs
/// out (typically singular A whose infimum is approached at the kernel).
MarginResult inclusion_margin(const SquareMatrix& a, double resolution = kDefaultMarginResolution,
                              bool certify = false);

/// Value of <A xi, xi> / |A xi| at a unit vector, +inf when A xi = 0.
double margin_objective(const SquareMatrix& a, std::span<const double> xi);

struct InclusionParams {
  double delta = 0.0;
  std::optional<double> K;

  /// Throws BadParam unless delta in (-1, 1] and K >= 1.
  void validate() const;
};

enum class Membership { Inside, Boundary, Outside };

std::string_view to_string(Membership m) noexcept;

struct InclusionVerdict {
  double margin = 0.0;
  Membership status = Membership::Boundary;
  Vector witness;
  /// K_O(A) when a distortion cap was requested.
  std::optional<double> outer_distortion;
};

inline constexpr double kDefaultBand = 1e-9;

/// Margin status classifier: inside when margin >= delta + band, outside
/// when margin <= delta - band, boundary otherwise.
Membership classify_margin(double margin, double delta, double band);

/// Membership in the cone of level delta, intersected with
/// {K_O(A) <= K} when `params.K` is set. The distortion cap is a hard
/// constraint (relative tolerance 1e-9) that can only downgrade the status
/// to outside. NonpositiveDeterminant propagates only when K is set.
InclusionVerdict in_cone(const SquareMatrix& a, const InclusionParams& params, double band = kDefaultBand,
                         double resolution = kDefaultMarginResolution);

/// True iff det(tI - A) has a real root below -1e-10, decided by Sturm
/// sequences on the exact-expansion characteristic polynomial. Throws
/// IllConditioned when a root lies within 1e-10 of zero.
bool has_negative_real_eigenvalue(const SquareMatrix& a);

/// Coefficients of det(tI - A), highest degree first (leading 1).
std::vector<long double> characteristic_polynomial(const SquareMatrix& a);

// ---------------------------------------------------------------------------
// Shift bounds

/// A + lambda I. Throws BadParam unless lambda > 0.
SquareMatrix shift(const SquareMatrix& a, double lambda);

/// C(delta, n) = (2 / sqrt(1 - (min(delta, 0))^2))^(n-1).
double shift_distortion_constant(double delta, int n);

struct BoundCheck {
  bool satisfied = false;
  double slack = 0.0;  ///< relative slack; negative means violated
};

struct ShiftBoundsReport {
  BoundCheck outer;         ///< K_O(A+lI) <= C K_O(A)
  BoundCheck inner;         ///< K_I(A+lI) <= C K_I(A)
  BoundCheck inverse_norm;  ///< ||(A+lI)^-1|| <= 1 / (l sqrt(1 - (delta ^ 0)^2))
  BoundCheck sandwich;      ///< per-index singular value bracket, worst index
  double det_shifted = 0.0;
  double constant = 0.0;

  bool all_satisfied() const {
    return outer.satisfied && inner.satisfied && inverse_norm.satisfied && sandwich.satisfied;
  }
};

/// Relative slack below which a bound counts as violated.
inline constexpr double kShiftBoundSlack = 1e-9;

/// Checks the four shift inequalities. Throws NotInCone unless
/// inclusion_margin(A) >= delta, BadParam unless delta > -1 and lambda > 0,
/// NonpositiveDeterminant when det A <= 0.
ShiftBoundsReport verify_shift_bounds(const SquareMatrix& a, double delta, double lambda);

/// Same inequalities without re-deriving the cone precondition; callers that
/// already hold the margin use this to avoid recomputing it per lambda.
ShiftBoundsReport evaluate_shift_bounds(const SquareMatrix& a, double delta, double lambda);

struct ReverseTriangleResult {
  bool holds = false;
  double slack = 0.0;  ///< |u+v| - sqrt(1-delta^2) max(|u|,|v|)
};

/// |u+v| >= sqrt(1-delta^2) max(|u|,|v|) under <u,v> >= delta |u||v|, up
/// to a slack of 1e-12 max(|u|, |v|, 1).
/// Throws HypothesisViolated when the angular condition fails and BadParam
/// when delta is outside (-1, 0].
ReverseTriangleResult reverse_triangle_check(std::span<const double> u, std::span<const double> v,
                                             double delta);

}  // namespace incl
