#pragma once

#include <array>
#include <initializer_list>
#include <span>
#include <vector>

#include "incl/error.hpp"

namespace incl {

using Vector = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

/// Dense real n x n matrix, 2 <= n <= 6, stored row-major.
///
/// Entries are always finite: every constructor and `set` rejects NaN and
/// infinities with `Errc::BadParam`, so downstream routines never re-check.
class SquareMatrix {
 public:
  static constexpr int kMinDim = 2;
  static constexpr int kMaxDim = 6;

  /// Zero matrix of dimension n.
  explicit SquareMatrix(int n);
  /// Row-major entries; `entries.size()` must equal n*n.
  SquareMatrix(int n, std::span<const double> entries);
  SquareMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static SquareMatrix identity(int n);
  static SquareMatrix diagonal(std::span<const double> diag);
  static SquareMatrix diagonal(std::initializer_list<double> diag);
  static SquareMatrix from_rows(const std::vector<std::vector<double>>& rows);
  static SquareMatrix rotation2(double theta);

  int dim() const noexcept { return n_; }
  double operator()(int i, int j) const noexcept { return a_[i * kMaxDim + j]; }
  void set(int i, int j, double value);

  std::vector<std::vector<double>> rows() const;

  SquareMatrix transpose() const;
  SquareMatrix operator+(const SquareMatrix& other) const;
  SquareMatrix operator-(const SquareMatrix& other) const;
  SquareMatrix operator*(const SquareMatrix& other) const;
  SquareMatrix scaled(double c) const;
  SquareMatrix operator-() const { return scaled(-1.0); }

  /// y = A x, with x and y of length n (y must not alias x).
  void apply(std::span<const double> x, std::span<double> y) const noexcept;
  Vector operator*(std::span<const double> x) const;

  double max_abs() const noexcept;
  bool is_zero() const noexcept { return max_abs() == 0.0; }

  bool operator==(const SquareMatrix& other) const noexcept;

 private:
  int n_;
  std::array<double, kMaxDim * kMaxDim> a_{};
};

/// Determinant by LU with partial pivoting (closed form for n = 2).
double determinant(const SquareMatrix& a);

/// Inverse by Gauss-Jordan with partial pivoting; throws
/// `Errc::IllConditioned` when a pivot vanishes.
SquareMatrix inverse(const SquareMatrix& a);

}  // namespace incl
