#include "incl/planar.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace incl {

ComplexDerivatives to_complex(const SquareMatrix& a) {
  if (a.dim() != 2) throw Error(Errc::DimensionMismatch, "Wirtinger form needs a 2 x 2 matrix");
  return {Complex(0.5 * (a(0, 0) + a(1, 1)), 0.5 * (a(1, 0) - a(0, 1))),
          Complex(0.5 * (a(0, 0) - a(1, 1)), 0.5 * (a(1, 0) + a(0, 1)))};
}

SquareMatrix from_complex(const ComplexDerivatives& d) {
  const double ar = d.fz.real(), ai = d.fz.imag(), br = d.fzbar.real(), bi = d.fzbar.imag();
  return SquareMatrix{{ar + br, bi - ai}, {ai + bi, ar - br}};
}

InclusionVerdict cond_membership(const ComplexDerivatives& d, double delta, double band) {
  if (!(delta > -1.0 && delta < 1.0)) throw Error(Errc::BadParam, "delta must lie in (-1, 1)");
  return in_cone(from_complex(d), InclusionParams{delta, std::nullopt}, band);
}

double sweep_margin(const ComplexDerivatives& d, int samples) {
  if (d.fz == 0.0 && d.fzbar == 0.0) return std::numeric_limits<double>::infinity();
  if (samples < 8) throw Error(Errc::BadParam, "sweep needs at least 8 samples");
  // The ratio re(zeta)/|zeta| is scale invariant; normalize to avoid
  // overflow in the squared modulus.
  const double scale = std::abs(d.fz) + std::abs(d.fzbar);
  const Complex a = d.fz / scale, b = d.fzbar / scale;
  thread_local std::vector<std::array<double, 2>> table;
  if (static_cast<int>(table.size()) != samples) {
    table.resize(samples);
    for (int j = 0; j < samples; ++j) {
      const double t = 2.0 * std::numbers::pi * j / samples;
      table[j] = {std::cos(t), std::sin(t)};
    }
  }
  double best = std::numeric_limits<double>::infinity();
  int at_best = 0, at_closest = 0;
  double closest = std::numeric_limits<double>::infinity();
  for (int j = 0; j < samples; ++j) {
    const double c = table[j][0], s = table[j][1];
    const double x = a.real() + b.real() * c - b.imag() * s;
    const double y = a.imag() + b.real() * s + b.imag() * c;
    const double r = std::sqrt(x * x + y * y);
    if (r < closest) closest = r, at_closest = j;
    if (r <= 1e-14) continue;
    if (x / r < best) best = x / r, at_best = j;
  }
  // The ratio turns fastest where the circle passes close to 0, over an arc
  // that can be far narrower than the grid step. Zoom in there and around
  // the coarse minimum, keeping the best ratio seen at any level.
  const double step = 2.0 * std::numbers::pi / samples;
  auto zoom = [&](double t0, bool by_modulus) {
    double h = step;
    for (int level = 0; level < 20; ++level) {
      double key_best = std::numeric_limits<double>::infinity(), t_best = t0;
      for (int j = -16; j <= 16; ++j) {
        const double t = t0 + h * j / 16.0;
        const double c = std::cos(t), s = std::sin(t);
        const double x = a.real() + b.real() * c - b.imag() * s;
        const double y = a.imag() + b.real() * s + b.imag() * c;
        const double r = std::sqrt(x * x + y * y);
        double key = r;
        if (r > 1e-14) {
          best = std::min(best, x / r);
          if (!by_modulus) key = x / r;
        } else if (!by_modulus) {
          continue;
        }
        if (key < key_best) key_best = key, t_best = t;
      }
      t0 = t_best;
      h /= 8.0;
    }
  };
  zoom(at_closest * step, true);
  zoom(at_best * step, false);
  return best;
}

bool cond_sector(const ComplexDerivatives& d, double delta) {
  if (d.fz == 0.0) return d.fzbar == 0.0;
  const double ratio = std::abs(d.fzbar) / std::abs(d.fz);
  if (ratio > 1.0) return false;
  return std::abs(std::arg(d.fz)) + std::asin(ratio) <= std::acos(delta);
}

double sector_gap(const ComplexDerivatives& d, double delta) {
  if (d.fz == 0.0) return d.fzbar == 0.0 ? 2.0 : -1.0 - delta;
  const double ratio = std::abs(d.fzbar) / std::abs(d.fz);
  if (ratio > 1.0) return -1.0 - delta;
  const double angle = std::min(std::numbers::pi, std::abs(std::arg(d.fz)) + std::asin(ratio));
  return std::cos(angle) - delta;
}

bool closed_form_primary(const ComplexDerivatives& d, double delta) {
  return std::abs(d.fzbar) + delta * std::abs(d.fz.imag()) <= std::sqrt(1.0 - delta * delta) * d.fz.real();
}

bool closed_form_secondary(const ComplexDerivatives& d, double delta) {
  const double m = std::abs(d.fz);
  return std::abs(d.fzbar) <= m && m <= d.fz.real() / std::sqrt(1.0 - delta * delta);
}

bool cond_closed_form(const ComplexDerivatives& d, double delta) {
  // The second alternative only implies the sector condition when delta <= 0:
  // for delta > 0, alpha = 1, beta = 0.99, delta = 0.5 satisfies it while the
  // disk about alpha leaves the sector.
  return closed_form_primary(d, delta) || (delta <= 0.0 && closed_form_secondary(d, delta));
}

SlackResult quasiregular_check(const ComplexDerivatives& d, double k) {
  if (!(k >= 0.0 && k < 1.0)) throw Error(Errc::BadParam, "k must lie in [0, 1)");
  const double slack = k * std::abs(d.fz) - std::abs(d.fzbar);
  return {slack >= -1e-12, slack};
}

double K_from_k(double k) {
  if (!(k >= 0.0 && k < 1.0)) throw Error(Errc::BadParam, "k must lie in [0, 1)");
  return (1.0 + k) / (1.0 - k);
}

double k_from_K(double K) {
  if (!(K >= 1.0)) throw Error(Errc::BadParam, "K must be >= 1");
  return (K - 1.0) / (K + 1.0);
}

double tau_for_K(double K) {
  if (!(K >= 1.0)) throw Error(Errc::BadParam, "K must be >= 1");
  return 2.0 * std::sqrt(K) / (K + 1.0);
}

QrParams QrParams::from_K(double K) { return {K, k_from_K(K), tau_for_K(K)}; }

QrParams QrParams::from_k(double k) { return {K_from_k(k), k, std::sqrt((1.0 - k) * (1.0 + k))}; }

double corollary_delta(double tau, double k) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw Error(Errc::BadParam, "tau must lie in [0, 1]");
  if (!(k >= 0.0 && k < 1.0)) throw Error(Errc::BadParam, "k must lie in [0, 1)");
  // The cone angle pi - arccos(tau) + arcsin(k) saturates at pi, where the
  // cone degenerates to delta = -1.
  return std::cos(std::min(std::numbers::pi, std::numbers::pi - std::acos(tau) + std::asin(k)));
}

}  // namespace incl
