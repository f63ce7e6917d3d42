#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "incl/matrix_core.hpp"
#include "support.hpp"

using namespace incl;
using incl::testing::dense_planar_margin;
using incl::testing::random_matrix;
using incl::testing::random_rotation;
using incl::testing::random_unit;

namespace {

constexpr double kPi = std::numbers::pi;

SquareMatrix gram(const SquareMatrix& a) { return a.transpose() * a; }

// sigma^2 are the roots of t^2 - |A|_F^2 t + det(A)^2.
std::vector<double> oracle_sv2(const SquareMatrix& a) {
  const double f = a(0, 0) * a(0, 0) + a(0, 1) * a(0, 1) + a(1, 0) * a(1, 0) + a(1, 1) * a(1, 1);
  const double d = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  const double disc = std::sqrt(std::max(0.0, f * f - 4.0 * d * d));
  const double big = 0.5 * (f + disc);
  const double small = big > 0.0 ? d * d / big : 0.0;
  return {std::sqrt(big), std::sqrt(small)};
}

// Eigenvalues of a symmetric 3 x 3 matrix by the trigonometric solution of
// its characteristic cubic.
std::vector<double> symmetric_eigenvalues3(const SquareMatrix& s) {
  const double p1 = s(0, 1) * s(0, 1) + s(0, 2) * s(0, 2) + s(1, 2) * s(1, 2);
  const double q = (s(0, 0) + s(1, 1) + s(2, 2)) / 3.0;
  const double p2 = (s(0, 0) - q) * (s(0, 0) - q) + (s(1, 1) - q) * (s(1, 1) - q) + (s(2, 2) - q) * (s(2, 2) - q) +
                    2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  if (p == 0.0) return {q, q, q};
  SquareMatrix b = s;
  for (int i = 0; i < 3; ++i) b.set(i, i, s(i, i) - q);
  b = b.scaled(1.0 / p);
  const double r = std::clamp(determinant(b) / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * kPi / 3.0);
  return {e1, 3.0 * q - e1 - e3, e3};
}

}  // namespace

// ---------------------------------------------------------------------------
// Singular values and distortion

TEST(SingularValues, DiagonalAndRotation) {
  const auto s = singular_values(SquareMatrix::diagonal({-3.0, 0.5, 2.0}));
  EXPECT_DOUBLE_EQ(s.sigma[0], 3.0);
  EXPECT_DOUBLE_EQ(s.sigma[1], 2.0);
  EXPECT_DOUBLE_EQ(s.sigma[2], 0.5);
  const auto r = singular_values(SquareMatrix::rotation2(0.7));
  EXPECT_NEAR(r.largest(), 1.0, 1e-15);
  EXPECT_NEAR(r.smallest(), 1.0, 1e-15);
}

TEST(SingularValues, TwoByTwoMatchesCharacteristicPolynomial) {
  SplitMix64 rng(11);
  for (int i = 0; i < 20000; ++i) {
    const SquareMatrix a = random_matrix(rng, 2, std::exp(rng.uniform(-5.0, 5.0)));
    const auto s = singular_values(a);
    const auto o = oracle_sv2(a);
    ASSERT_NEAR(s.sigma[0], o[0], 1e-13 * o[0]);
    ASSERT_NEAR(s.sigma[1], o[1], 1e-12 * o[0]);
  }
}

TEST(SingularValues, ThreeByThreeMatchesTrigonometricCubic) {
  SplitMix64 rng(12);
  for (int i = 0; i < 20000; ++i) {
    const SquareMatrix a = random_matrix(rng, 3);
    const auto s = singular_values(a);
    const auto e = symmetric_eigenvalues3(gram(a));
    const double top = s.largest();
    for (int k = 0; k < 3; ++k) ASSERT_NEAR(s.sigma[k] * s.sigma[k], std::max(0.0, e[k]), 1e-12 * top * top);
  }
}

TEST(SingularValues, InvariantsUpToSix) {
  SplitMix64 rng(13);
  for (int n = 2; n <= 6; ++n) {
    for (int i = 0; i < 2000; ++i) {
      const SquareMatrix a = random_matrix(rng, n);
      const auto s = singular_values(a);
      ASSERT_TRUE(std::is_sorted(s.sigma.rbegin(), s.sigma.rend()));
      double frob = 0.0, sum = 0.0;
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) frob += a(r, c) * a(r, c);
      for (double x : s.sigma) sum += x * x;
      ASSERT_NEAR(sum, frob, 1e-12 * frob);
      ASSERT_NEAR(s.product(), std::abs(determinant(a)), 1e-12 * std::pow(s.largest(), n));
      // Extremal stretch over random directions stays inside [sigma_n, sigma_1].
      for (int k = 0; k < 4; ++k) {
        const Vector x = random_unit(rng, n);
        const double ax = norm(a * x);
        ASSERT_LE(ax, s.largest() * (1.0 + 1e-12));
        ASSERT_GE(ax, s.smallest() * (1.0 - 1e-12) - 1e-15);
      }
    }
  }
}

TEST(SingularValues, OrthogonalInvariance) {
  SplitMix64 rng(14);
  for (int n = 2; n <= 6; ++n) {
    for (int i = 0; i < 200; ++i) {
      const SquareMatrix a = random_matrix(rng, n);
      const SquareMatrix b = random_rotation(rng, n) * a * random_rotation(rng, n);
      const auto sa = singular_values(a), sb = singular_values(b);
      for (int k = 0; k < n; ++k) ASSERT_NEAR(sa.sigma[k], sb.sigma[k], 1e-12 * sa.largest());
    }
  }
}

TEST(Distortion, KnownValues) {
  EXPECT_DOUBLE_EQ(outer_distortion(SquareMatrix::identity(4)), 1.0);
  EXPECT_DOUBLE_EQ(outer_distortion(SquareMatrix::diagonal({2.0, 1.0})), 2.0);
  EXPECT_DOUBLE_EQ(inner_distortion(SquareMatrix::diagonal({2.0, 1.0})), 2.0);
  // diag(4, 2, 1): K_O = 64 / 8, K_I = 8 / 1.
  EXPECT_NEAR(outer_distortion(SquareMatrix::diagonal({4.0, 2.0, 1.0})), 8.0, 1e-14);
  EXPECT_NEAR(inner_distortion(SquareMatrix::diagonal({4.0, 2.0, 1.0})), 8.0, 1e-14);
}

TEST(Distortion, ConformalIsOneAndPlanarKOEqualsKI) {
  SplitMix64 rng(15);
  for (int i = 0; i < 1000; ++i) {
    const SquareMatrix q = random_rotation(rng, 3).scaled(rng.uniform(0.1, 10.0));
    ASSERT_NEAR(outer_distortion(q), 1.0, 1e-12);
    SquareMatrix a = random_matrix(rng, 2);
    if (determinant(a) <= 0.0) continue;
    ASSERT_NEAR(outer_distortion(a), inner_distortion(a), 1e-9 * outer_distortion(a));
    ASSERT_GE(outer_distortion(a), 1.0 - 1e-15);
  }
}

TEST(Distortion, NonpositiveDeterminantThrows) {
  try {
    outer_distortion(SquareMatrix::diagonal({1.0, -1.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonpositiveDeterminant);
  }
  EXPECT_THROW(inner_distortion(SquareMatrix(3)), Error);
}

// ---------------------------------------------------------------------------
// Margin

TEST(Margin, TrivialCases) {
  EXPECT_NEAR(inclusion_margin(SquareMatrix::identity(3)).value, 1.0, 1e-12);
  EXPECT_NEAR(inclusion_margin(-SquareMatrix::identity(2)).value, -1.0, 1e-12);
  EXPECT_TRUE(std::isinf(inclusion_margin(SquareMatrix(2)).value));
  for (double t : {0.1, 1.0, 2.0, 3.0}) EXPECT_NEAR(inclusion_margin(SquareMatrix::rotation2(t)).value, std::cos(t), 1e-12);
}

TEST(Margin, QuarterTurnWithStretch) {
  // xi = (c, s): <A xi, xi> = -cs and |A xi|^2 = 4s^2 + c^2; the minimum
  // -1/3 sits at tan t = 1/sqrt(2).
  const SquareMatrix a{{0.0, -2.0}, {1.0, 0.0}};
  const auto m = inclusion_margin(a);
  EXPECT_NEAR(m.value, -1.0 / 3.0, 1e-12);
  EXPECT_NEAR(dense_planar_margin(a, 1 << 20), -1.0 / 3.0, 1e-9);
  EXPECT_NEAR(margin_objective(a, m.witness), m.value, 1e-15);
  const auto c = inclusion_margin(a, 1e-9, true);
  EXPECT_TRUE(c.certified);
  EXPECT_LE(std::abs(c.value + 1.0 / 3.0), c.error_bound + 1e-15);
}

TEST(Margin, PlanarMatchesDenseSweep) {
  SplitMix64 rng(21);
  for (int i = 0; i < 2000; ++i) {
    const SquareMatrix a = random_matrix(rng, 2);
    const double m = inclusion_margin(a).value;
    const double sweep = dense_planar_margin(a, 1 << 16);
    // The sweep only over-estimates; its grid error is tiny unless the
    // minimum sits in a narrow valley near a small singular value.
    ASSERT_LE(m, sweep + 1e-12);
    const double kappa = singular_values(a).largest() / std::max(singular_values(a).smallest(), 1e-300);
    if (kappa < 100.0) {
      ASSERT_NEAR(m, sweep, 1e-6);
    }
  }
}

TEST(Margin, CertifiedBracketsUncertified) {
  SplitMix64 rng(22);
  for (int n = 2; n <= 3; ++n) {
    for (int i = 0; i < 300; ++i) {
      const SquareMatrix a = random_matrix(rng, n);
      const auto plain = inclusion_margin(a);
      const auto cert = inclusion_margin(a, 1e-9, true);
      ASSERT_TRUE(cert.certified);
      ASSERT_LE(cert.error_bound, 1e-9);
      // The certified lower end is a true lower bound; the uncertified value
      // is attained at a witness, so it is an upper bound.
      ASSERT_GE(plain.value, cert.value - cert.error_bound - 1e-15);
      ASSERT_LE(plain.value, cert.value + 1e-9);
    }
  }
}

TEST(Margin, ScaleAndRotationInvariance) {
  SplitMix64 rng(23);
  for (int n = 2; n <= 5; ++n) {
    for (int i = 0; i < 100; ++i) {
      const SquareMatrix a = random_matrix(rng, n);
      const double m = inclusion_margin(a).value;
      ASSERT_NEAR(inclusion_margin(a.scaled(rng.uniform(0.01, 100.0))).value, m, 1e-8);
      const SquareMatrix q = random_rotation(rng, n);
      ASSERT_NEAR(inclusion_margin(q * a * q.transpose()).value, m, 1e-6);
      ASSERT_LE(m, 1.0 + 1e-15);
      ASSERT_GE(m, -1.0 - 1e-15);
    }
  }
}

TEST(Margin, WitnessIsUnitAndAttains) {
  SplitMix64 rng(24);
  for (int n = 2; n <= 6; ++n) {
    const SquareMatrix a = random_matrix(rng, n);
    const auto m = inclusion_margin(a);
    ASSERT_NEAR(norm(m.witness), 1.0, 1e-12);
    ASSERT_NEAR(margin_objective(a, m.witness), m.value, 1e-12);
  }
}

TEST(Margin, NegativeRealEigenvalueForcesMinusOne) {
  SplitMix64 rng(25);
  for (int n = 2; n <= 6; ++n) {
    int seen = 0;
    for (int i = 0; i < 400; ++i) {
      const SquareMatrix a = random_matrix(rng, n);
      bool negative = false;
      try {
        negative = has_negative_real_eigenvalue(a);
      } catch (const Error&) {
        continue;
      }
      const double m = inclusion_margin(a).value;
      if (negative) {
        ++seen;
        ASSERT_NEAR(m, -1.0, 1e-9);
      } else {
        // No negative eigenvalue leaves the margin above -1 unless a complex
        // pair hugs the negative axis.
        ASSERT_GE(m, -1.0);
      }
    }
    EXPECT_GT(seen, 10);
  }
}

TEST(Margin, CertifyUnavailableAboveThree) {
  try {
    inclusion_margin(SquareMatrix::identity(4), 1e-9, true);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::CertificationUnavailable);
  }
}

TEST(Cone, VerdictsAndNesting) {
  const InclusionVerdict id = in_cone(SquareMatrix::identity(2), {0.0, std::nullopt});
  EXPECT_EQ(id.status, Membership::Inside);
  const InclusionVerdict neg = in_cone(-SquareMatrix::identity(2), {-0.5, std::nullopt});
  EXPECT_EQ(neg.status, Membership::Outside);
  // Distortion cap only downgrades.
  const SquareMatrix stretch = SquareMatrix::diagonal({3.0, 1.0});
  EXPECT_EQ(in_cone(stretch, {0.0, 2.0}).status, Membership::Outside);
  EXPECT_EQ(in_cone(stretch, {0.0, 3.0}).status, Membership::Inside);
  EXPECT_THROW(in_cone(stretch, {1.5, std::nullopt}), Error);
  EXPECT_THROW(in_cone(stretch, {0.0, 0.5}), Error);

  SplitMix64 rng(26);
  for (int i = 0; i < 2000; ++i) {
    const SquareMatrix a = random_matrix(rng, 3);
    const double d1 = rng.uniform(-0.99, 0.99);
    const double d2 = rng.uniform(-0.99, d1);
    if (in_cone(a, {d1, std::nullopt}).status == Membership::Inside && d2 < d1 - 2e-9) {
      ASSERT_NE(in_cone(a, {d2, std::nullopt}).status, Membership::Outside);
    }
  }
}

TEST(Cone, ClassifyBand) {
  EXPECT_EQ(classify_margin(0.5, 0.5, 1e-9), Membership::Boundary);
  EXPECT_EQ(classify_margin(0.5 + 2e-9, 0.5, 1e-9), Membership::Inside);
  EXPECT_EQ(classify_margin(0.5 - 2e-9, 0.5, 1e-9), Membership::Outside);
}

// ---------------------------------------------------------------------------
// Eigenvalues

TEST(Eigen, CharacteristicPolynomialOfDiagonal) {
  const auto p = characteristic_polynomial(SquareMatrix::diagonal({1.0, 2.0, 3.0}));
  ASSERT_EQ(p.size(), 4u);
  EXPECT_DOUBLE_EQ(static_cast<double>(p[0]), 1.0);
  EXPECT_DOUBLE_EQ(static_cast<double>(p[1]), -6.0);
  EXPECT_DOUBLE_EQ(static_cast<double>(p[2]), 11.0);
  EXPECT_DOUBLE_EQ(static_cast<double>(p[3]), -6.0);
}

TEST(Eigen, NegativeRealEigenvalueDetection) {
  EXPECT_TRUE(has_negative_real_eigenvalue(-SquareMatrix::identity(2)));
  EXPECT_TRUE(has_negative_real_eigenvalue(SquareMatrix::diagonal({2.0, -0.5, 1.0})));
  EXPECT_FALSE(has_negative_real_eigenvalue(SquareMatrix::rotation2(3.0)));
  EXPECT_FALSE(has_negative_real_eigenvalue(SquareMatrix::identity(5)));
  try {
    has_negative_real_eigenvalue(SquareMatrix::diagonal({1.0, 1e-13}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::IllConditioned);
  }
}

TEST(Eigen, AgreesWithTwoByTwoDiscriminant) {
  SplitMix64 rng(31);
  for (int i = 0; i < 20000; ++i) {
    const SquareMatrix a = random_matrix(rng, 2);
    const double tr = a(0, 0) + a(1, 1), det = determinant(a);
    const double disc = tr * tr - 4.0 * det;
    if (std::abs(det) < 1e-6 || std::abs(disc) < 1e-9) continue;
    // Real roots (tr +- sqrt(disc)) / 2; at least one negative iff det < 0
    // or both negative.
    const bool expected = disc > 0.0 && (det < 0.0 || tr < 0.0);
    ASSERT_EQ(has_negative_real_eigenvalue(a), expected);
  }
}

// ---------------------------------------------------------------------------
// Shift bounds

TEST(Shift, ConstantValues) {
  EXPECT_DOUBLE_EQ(shift_distortion_constant(0.0, 2), 2.0);
  EXPECT_DOUBLE_EQ(shift_distortion_constant(0.7, 3), 4.0);
  EXPECT_NEAR(shift_distortion_constant(-0.6, 3), std::pow(2.0 / 0.8, 2), 1e-14);
  EXPECT_THROW(shift(SquareMatrix::identity(2), 0.0), Error);
}

TEST(Shift, BoundsHoldOnRandomConeMatrices) {
  SplitMix64 rng(41);
  for (int n = 2; n <= 4; ++n) {
    int tested = 0;
    while (tested < 300) {
      const SquareMatrix a = random_matrix(rng, n);
      if (determinant(a) <= 0.0) continue;
      const double m = inclusion_margin(a).value;
      if (m <= -1.0 + 1e-6) continue;
      ++tested;
      const double delta = std::min(m, 0.0) - 1e-9;
      for (double lambda : {0.01, 1.0, 100.0}) {
        const auto r = evaluate_shift_bounds(a, delta, lambda);
        ASSERT_TRUE(r.all_satisfied()) << "n=" << n << " lambda=" << lambda;
        ASSERT_GT(r.det_shifted, 0.0);
      }
    }
  }
}

TEST(Shift, VerifyRejectsMatricesOutsideTheCone) {
  try {
    verify_shift_bounds(SquareMatrix{{0.0, -2.0}, {1.0, 0.0}}, 0.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotInCone);
  }
  EXPECT_TRUE(verify_shift_bounds(SquareMatrix{{0.0, -2.0}, {1.0, 0.0}}, -0.4, 1.0).all_satisfied());
}

// ---------------------------------------------------------------------------
// Reverse triangle inequality

TEST(ReverseTriangle, Examples) {
  const Vector u{1.0, 0.0}, v{0.0, 1.0};
  const auto r = reverse_triangle_check(u, v, 0.0);
  EXPECT_TRUE(r.holds);
  EXPECT_NEAR(r.slack, std::sqrt(2.0) - 1.0, 1e-15);
  // v = t (d, sqrt(1 - d^2)) with t = -d minimizes |u + v|^2 = 1 + 2td + t^2
  // at the angle limit, and there |u + v| = sqrt(1 - d^2) max(|u|, |v|).
  const double d = -0.6;
  const Vector w{-d * d, -d * std::sqrt(1.0 - d * d)};
  const auto s = reverse_triangle_check(u, w, d);
  EXPECT_TRUE(s.holds);
  EXPECT_NEAR(s.slack, 0.0, 1e-14);
}

TEST(ReverseTriangle, Errors) {
  const Vector u{1.0, 0.0}, v{-1.0, 0.0};
  try {
    reverse_triangle_check(u, v, -0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::HypothesisViolated);
  }
  EXPECT_THROW(reverse_triangle_check(u, u, 0.5), Error);
}

TEST(ReverseTriangle, RandomPairsAtTheAngleLimit) {
  SplitMix64 rng(51);
  for (int i = 0; i < 50000; ++i) {
    const int n = 2 + static_cast<int>(rng.next() % 5);
    const double delta = rng.uniform(-0.999, 0.0);
    Vector u = random_unit(rng, n), w = random_unit(rng, n);
    const double p = dot(u, w);
    for (int j = 0; j < n; ++j) w[j] -= p * u[j];
    const double nw = norm(w);
    for (auto& x : w) x /= nw;
    const double phi = std::acos(delta) * rng.uniform(0.0, 1.0 - 1e-9);
    const double su = std::exp(rng.uniform(-5.0, 5.0)), sv = std::exp(rng.uniform(-5.0, 5.0));
    Vector v(n);
    for (int j = 0; j < n; ++j) {
      v[j] = sv * (std::cos(phi) * u[j] + std::sin(phi) * w[j]);
      u[j] *= su;
    }
    ASSERT_TRUE(reverse_triangle_check(u, v, delta).holds);
  }
}

// ---------------------------------------------------------------------------
// Matrix basics

TEST(SquareMatrixBasics, RejectsNonFiniteAndBadDimensions) {
  EXPECT_THROW(SquareMatrix(1), Error);
  EXPECT_THROW(SquareMatrix(7), Error);
  SquareMatrix a(2);
  EXPECT_THROW(a.set(0, 0, NAN), Error);
  EXPECT_THROW(a.set(0, 0, INFINITY), Error);
  EXPECT_THROW(SquareMatrix::from_rows({{1.0, 2.0}, {3.0}}), Error);
}

TEST(SquareMatrixBasics, DeterminantAndInverse) {
  SplitMix64 rng(61);
  for (int n = 2; n <= 6; ++n) {
    for (int i = 0; i < 100; ++i) {
      const SquareMatrix a = random_matrix(rng, n);
      if (std::abs(determinant(a)) < 1e-3) continue;
      const SquareMatrix prod = a * inverse(a);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) ASSERT_NEAR(prod(r, c), r == c ? 1.0 : 0.0, 1e-9);
      ASSERT_NEAR(determinant(a.transpose()), determinant(a), 1e-12);
    }
  }
}
