#pragma once

// Planar differentials in Wirtinger form and the three equivalent membership
// tests for the two-dimensional cone.

#include <complex>

#include "incl/matrix_core.hpp"

namespace incl {

using Complex = std::complex<double>;

/// (f_z, f_zbar) of a planar differential.
struct ComplexDerivatives {
  Complex fz;
  Complex fzbar;

  bool operator==(const ComplexDerivatives&) const = default;
};

/// Rows (u_x, u_y; v_x, v_y) for f = u + iv. Throws DimensionMismatch for
/// n != 2.
ComplexDerivatives to_complex(const SquareMatrix& a);
SquareMatrix from_complex(const ComplexDerivatives& d);

/// Condition (i): cone membership through the matrix margin.
InclusionVerdict cond_membership(const ComplexDerivatives& d, double delta, double band = kDefaultBand);

/// Independent route to the same margin: min over |w| = 1 of
/// re(f_z + f_zbar w) / |f_z + f_zbar w| on `samples` equally spaced w,
/// then zoomed resampling near the point closest to 0 and near the coarse
/// minimum. Never below the true margin.
double sweep_margin(const ComplexDerivatives& d, int samples = 1 << 14);

/// Condition (ii): |arg f_z| + arcsin|f_zbar / f_z| <= arccos delta.
/// At f_z = 0 this is defined as f_zbar = 0.
bool cond_sector(const ComplexDerivatives& d, double delta);

/// Signed distance of condition (ii) from its threshold, measured on the
/// margin scale: cos(min(pi, |arg f_z| + arcsin r)) - delta, with margin -1
/// when r = |f_zbar / f_z| > 1. Positive means the condition holds strictly.
double sector_gap(const ComplexDerivatives& d, double delta);

/// |f_zbar| + delta |im f_z| <= sqrt(1 - delta^2) re f_z.
bool closed_form_primary(const ComplexDerivatives& d, double delta);
/// |f_zbar| <= |f_z| <= re f_z / sqrt(1 - delta^2).
bool closed_form_secondary(const ComplexDerivatives& d, double delta);
/// The primary closed form, or the secondary one when delta <= 0.
bool cond_closed_form(const ComplexDerivatives& d, double delta);

struct SlackResult {
  bool holds = false;
  double slack = 0.0;
};

/// |f_zbar| <= k |f_z| + 1e-12; slack is k|f_z| - |f_zbar|.
SlackResult quasiregular_check(const ComplexDerivatives& d, double k);

/// Distortion parameters K = (1+k)/(1-k).
struct QrParams {
  double K = 1.0;
  double k = 0.0;
  double tau = 1.0;

  static QrParams from_K(double K);
  static QrParams from_k(double k);
};

double K_from_k(double k);
double k_from_K(double K);

/// 2 sqrt(K) / (K + 1). Throws BadParam for K < 1.
double tau_for_K(double K);

/// cos(pi - arccos tau + arcsin k) with the angle capped at pi, so the
/// result is -1 exactly when tau >= sqrt(1 - k^2).
/// Throws BadParam unless tau in [0, 1] and k in [0, 1).
double corollary_delta(double tau, double k);

}  // namespace incl
