#include "incl/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace incl {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  // Plain sum of squares unless it over- or underflowed.
  if (s > 1e-280 && s < 1e280) return std::sqrt(s);
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  s = 0.0;
  for (double v : a) {
    const double t = v / scale;
    s += t * t;
  }
  return scale * std::sqrt(s);
}

namespace {

void check_dim(int n) {
  if (n < SquareMatrix::kMinDim || n > SquareMatrix::kMaxDim) {
    throw Error(Errc::BadParam, "matrix dimension " + std::to_string(n) + " outside [2, 6]");
  }
}

void check_finite(double v) {
  if (!std::isfinite(v)) throw Error(Errc::BadParam, "matrix entry is not finite");
}

}  // namespace

SquareMatrix::SquareMatrix(int n) : n_(n) { check_dim(n); }

SquareMatrix::SquareMatrix(int n, std::span<const double> entries) : n_(n) {
  check_dim(n);
  if (entries.size() != static_cast<std::size_t>(n * n)) {
    throw Error(Errc::DimensionMismatch, "expected " + std::to_string(n * n) + " entries, got " +
                                             std::to_string(entries.size()));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) set(i, j, entries[i * n + j]);
  }
}

SquareMatrix::SquareMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : n_(static_cast<int>(rows.size())) {
  check_dim(n_);
  int i = 0;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != n_) {
      throw Error(Errc::DimensionMismatch, "row length differs from row count");
    }
    int j = 0;
    for (double v : row) set(i, j++, v);
    ++i;
  }
}

SquareMatrix SquareMatrix::identity(int n) {
  SquareMatrix m(n);
  for (int i = 0; i < n; ++i) m.a_[i * kMaxDim + i] = 1.0;
  return m;
}

SquareMatrix SquareMatrix::diagonal(std::span<const double> diag) {
  SquareMatrix m(static_cast<int>(diag.size()));
  for (int i = 0; i < m.n_; ++i) m.set(i, i, diag[i]);
  return m;
}

SquareMatrix SquareMatrix::diagonal(std::initializer_list<double> diag) {
  return diagonal(std::span<const double>(diag.begin(), diag.size()));
}

SquareMatrix SquareMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const int n = static_cast<int>(rows.size());
  check_dim(n);
  SquareMatrix m(n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n) {
      throw Error(Errc::DimensionMismatch, "row " + std::to_string(i) + " has " +
                                               std::to_string(rows[i].size()) + " entries, expected " +
                                               std::to_string(n));
    }
    for (int j = 0; j < n; ++j) m.set(i, j, rows[i][j]);
  }
  return m;
}

SquareMatrix SquareMatrix::rotation2(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return SquareMatrix{{c, -s}, {s, c}};
}

void SquareMatrix::set(int i, int j, double value) {
  check_finite(value);
  a_[i * kMaxDim + j] = value;
}

std::vector<std::vector<double>> SquareMatrix::rows() const {
  std::vector<std::vector<double>> out(n_, std::vector<double>(n_));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) out[i][j] = (*this)(i, j);
  return out;
}

SquareMatrix SquareMatrix::transpose() const {
  SquareMatrix t(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) t.a_[j * kMaxDim + i] = a_[i * kMaxDim + j];
  return t;
}

SquareMatrix SquareMatrix::operator+(const SquareMatrix& other) const {
  if (other.n_ != n_) throw Error(Errc::DimensionMismatch, "matrix sum of different sizes");
  SquareMatrix r(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) r.set(i, j, (*this)(i, j) + other(i, j));
  return r;
}

SquareMatrix SquareMatrix::operator-(const SquareMatrix& other) const {
  if (other.n_ != n_) throw Error(Errc::DimensionMismatch, "matrix difference of different sizes");
  SquareMatrix r(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) r.set(i, j, (*this)(i, j) - other(i, j));
  return r;
}

SquareMatrix SquareMatrix::operator*(const SquareMatrix& other) const {
  if (other.n_ != n_) throw Error(Errc::DimensionMismatch, "matrix product of different sizes");
  SquareMatrix r(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      double s = 0.0;
      for (int k = 0; k < n_; ++k) s += (*this)(i, k) * other(k, j);
      r.set(i, j, s);
    }
  return r;
}

SquareMatrix SquareMatrix::scaled(double c) const {
  SquareMatrix r(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) r.set(i, j, c * (*this)(i, j));
  return r;
}

void SquareMatrix::apply(std::span<const double> x, std::span<double> y) const noexcept {
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) s += a_[i * kMaxDim + j] * x[j];
    y[i] = s;
  }
}

Vector SquareMatrix::operator*(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) throw Error(Errc::DimensionMismatch, "vector length");
  Vector y(n_);
  apply(x, y);
  return y;
}

double SquareMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m = std::max(m, std::abs((*this)(i, j)));
  return m;
}

bool SquareMatrix::operator==(const SquareMatrix& other) const noexcept {
  if (n_ != other.n_) return false;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if ((*this)(i, j) != other(i, j)) return false;
  return true;
}

double determinant(const SquareMatrix& a) {
  const int n = a.dim();
  if (n == 2) {
    // Kahan's fma trick keeps ad - bc accurate under cancellation.
    const double bc = a(0, 1) * a(1, 0);
    const double err = std::fma(a(0, 1), a(1, 0), -bc);
    return std::fma(a(0, 0), a(1, 1), -bc) - err;
  }
  if (n > SquareMatrix::kMaxDim) return 0.0;
  std::array<double, 36> lu{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) lu[i * n + j] = a(i, j);
  double det = 1.0;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(lu[i * n + k]) > std::abs(lu[piv * n + k])) piv = i;
    if (lu[piv * n + k] == 0.0) return 0.0;
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(lu[k * n + j], lu[piv * n + j]);
      det = -det;
    }
    const double p = lu[k * n + k];
    det *= p;
    for (int i = k + 1; i < n; ++i) {
      const double f = lu[i * n + k] / p;
      for (int j = k + 1; j < n; ++j) lu[i * n + j] -= f * lu[k * n + j];
    }
  }
  return det;
}

SquareMatrix inverse(const SquareMatrix& a) {
  const int n = a.dim();
  std::array<double, 72> w{};  // [A | I], n x 2n
  const int m = 2 * n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) w[i * m + j] = a(i, j);
    w[i * m + n + i] = 1.0;
  }
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(w[i * m + k]) > std::abs(w[piv * m + k])) piv = i;
    if (w[piv * m + k] == 0.0) throw Error(Errc::IllConditioned, "singular matrix has no inverse");
    if (piv != k)
      for (int j = 0; j < m; ++j) std::swap(w[k * m + j], w[piv * m + j]);
    const double p = w[k * m + k];
    for (int j = 0; j < m; ++j) w[k * m + j] /= p;
    for (int i = 0; i < n; ++i) {
      if (i == k) continue;
      const double f = w[i * m + k];
      if (f == 0.0) continue;
      for (int j = 0; j < m; ++j) w[i * m + j] -= f * w[k * m + j];
    }
  }
  SquareMatrix inv(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv.set(i, j, w[i * m + n + j]);
  return inv;
}

}  // namespace incl
