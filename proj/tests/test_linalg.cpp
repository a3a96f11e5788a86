#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "laxlab/linalg.hpp"
#include "oracles.hpp"

using namespace laxlab;

namespace {

void expect_near(cplx a, cplx b, double tol) { EXPECT_LT(std::abs(a - b), tol) << a << " vs " << b; }

}  // namespace

TEST(TracePower, IdentityAndDiagonal) {
  EXPECT_EQ(mat_trace_power(CMatrix::identity(2), 2), cplx(2.0));
  const cplx d[] = {1.0, 2.0};
  EXPECT_EQ(mat_trace_power(CMatrix::diagonal(d), 2), cplx(5.0));
  EXPECT_EQ(mat_trace_power(CMatrix{{2.0, -kI}, {kI, 3.0}}, 2), cplx(15.0));
  EXPECT_EQ(mat_trace_power(CMatrix{{2.0, -kI}, {kI, 3.0}}, 0), cplx(2.0));
}

TEST(CharPoly, SmallExamples) {
  auto a = char_poly(CMatrix::identity(2));
  expect_near(a[0], -1.0, 1e-15);
  expect_near(a[1], 2.0, 1e-15);
  const cplx d[] = {1.0, 2.0};
  a = char_poly(CMatrix::diagonal(d));
  expect_near(a[0], -2.0, 1e-15);
  expect_near(a[1], 3.0, 1e-15);
  EXPECT_THROW(char_poly(CMatrix(0)), LaxError);
}

TEST(CharPoly, MatchesMinorExpansionOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const CMatrix l = oracle::random_matrix(rng, n);
    const auto fast = char_poly(l);
    const auto slow = oracle::char_poly_by_minors(l);
    for (std::size_t i = 0; i < n; ++i) expect_near(fast[i], slow[i], 1e-12);
  }
}

TEST(CharPoly, CayleyHamiltonResidual) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const CMatrix l = oracle::random_matrix(rng, n, 2.0);
    EXPECT_LT(cayley_hamilton_residual(l, char_poly(l)), cayley_hamilton_bound(l));
  }
}

TEST(Newton, Examples) {
  const cplx f1[] = {2.0, 2.0};
  auto a = coeffs_from_power_sums(f1);
  expect_near(a[0], -1.0, 1e-15);
  expect_near(a[1], 2.0, 1e-15);
  const cplx f2[] = {3.0, 5.0};
  a = coeffs_from_power_sums(f2);
  expect_near(a[0], -2.0, 1e-15);
  expect_near(a[1], 3.0, 1e-15);
  const cplx f3[] = {0.0, 0.0, 0.0};
  a = coeffs_from_power_sums(f3);
  for (std::size_t i = 0; i < 3; ++i) expect_near(a[i], 0.0, 1e-15);
}

TEST(Newton, AgreesWithCharPolyAndRoundTrips) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const CMatrix l = oracle::random_matrix(rng, n);
    std::vector<cplx> p(n);
    for (std::size_t k = 1; k <= n; ++k) p[k - 1] = mat_trace_power(l, static_cast<unsigned>(k));
    const auto a = coeffs_from_power_sums(p);
    const auto b = char_poly(l);
    for (std::size_t i = 0; i < n; ++i) expect_near(a[i], b[i], 1e-12);
    const auto back = power_sums_from_coeffs(a);
    for (std::size_t k = 0; k < n; ++k) expect_near(back[k], p[k], 1e-12);
  }
}

TEST(Eigenvalues, Examples) {
  const cplx d[] = {3.0, cplx{1.0, 2.0}};
  auto ev = eigenvalues(CMatrix::diagonal(d));
  expect_near(ev[0], cplx(1.0, 2.0), 1e-15);
  expect_near(ev[1], 3.0, 1e-15);

  ev = eigenvalues(CMatrix{{0.0, 1.0}, {1.0, 0.0}});
  expect_near(ev[0], -1.0, 1e-14);
  expect_near(ev[1], 1.0, 1e-14);

  // companion of λ² − 3λ + 2; quadratic formula gives (3 ± 1)/2
  ev = eigenvalues(CMatrix{{0.0, 1.0}, {-2.0, 3.0}});
  expect_near(ev[0], (3.0 - 1.0) / 2.0, 1e-13);
  expect_near(ev[1], (3.0 + 1.0) / 2.0, 1e-13);
}

TEST(Eigenvalues, CanonicalOrderBreaksTiesOnImaginaryPart) {
  std::vector<cplx> v{{1.0, 2.0}, {1.0 + 1e-12, -1.0}, {0.0, 5.0}};
  canonical_sort(v);
  EXPECT_EQ(v[0], cplx(0.0, 5.0));
  EXPECT_EQ(v[1], cplx(1.0 + 1e-12, -1.0));
  EXPECT_EQ(v[2], cplx(1.0, 2.0));
}

TEST(Eigenvalues, TraceAndDeterminantConsistency) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const CMatrix m = oracle::random_matrix(rng, n);
    const auto ev = eigenvalues(m);
    ASSERT_EQ(ev.size(), n);
    cplx sum{}, prod{1.0};
    for (const auto& e : ev) {
      sum += e;
      prod *= e;
    }
    std::vector<std::vector<cplx>> rows(n, std::vector<cplx>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) rows[i][j] = m(i, j);
    expect_near(sum, trace(m), 1e-9);
    expect_near(prod, oracle::cofactor_det(rows), 1e-9);
  }
}

TEST(Eigenvalues, PowerSumsMatchTraces) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const CMatrix m = oracle::random_matrix(rng, n);
    const auto ev = eigenvalues(m);
    for (unsigned k = 1; k <= 4; ++k) {
      cplx s{};
      for (const auto& e : ev) s += std::pow(e, static_cast<int>(k));
      expect_near(s, mat_trace_power(m, k), 1e-9);
    }
  }
}

TEST(Eigenvalues, SimilarityInvariance) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const CMatrix m = oracle::random_matrix(rng, n);
    // well-conditioned P: identity plus a small perturbation
    const CMatrix p = CMatrix::identity(n) + oracle::random_matrix(rng, n, 0.2);
    const auto a = eigenvalues(m);
    const auto b = eigenvalues(p * m * inverse(p));
    for (std::size_t i = 0; i < n; ++i) expect_near(a[i], b[i], 1e-8);
  }
}

TEST(Eigenvalues, HandlesLargerDefectiveAndTriangular) {
  // Jordan-like block: repeated eigenvalue 2
  CMatrix j(4);
  for (std::size_t i = 0; i < 4; ++i) {
    j(i, i) = 2.0;
    if (i + 1 < 4) j(i, i + 1) = 1.0;
  }
  for (const auto& e : eigenvalues(j)) EXPECT_LT(std::abs(e - 2.0), 1e-3);

  std::mt19937_64 rng(17);
  const CMatrix m = oracle::random_matrix(rng, 16);
  const auto ev = eigenvalues(m);
  cplx s{};
  for (const auto& e : ev) s += e;
  expect_near(s, trace(m), 1e-9);
}

TEST(Eigenvalues, RejectsNonFiniteInput) {
  CMatrix m(2);
  m(0, 0) = cplx{std::nan(""), 0.0};
  EXPECT_THROW(eigenvalues(m), LaxError);
}

TEST(MatExp, Examples) {
  const CMatrix z(3);
  EXPECT_LT(max_abs(mat_exp(z) - CMatrix::identity(3)), 1e-15);

  const cplx d[] = {0.7, cplx{-1.0, 2.0}};
  const CMatrix e = mat_exp(CMatrix::diagonal(d));
  expect_near(e(0, 0), std::exp(cplx{0.7}), 1e-14);
  expect_near(e(1, 1), std::exp(cplx{-1.0, 2.0}), 1e-14);
  expect_near(e(0, 1), 0.0, 1e-15);

  const double th = 0.3;
  const CMatrix rot = mat_exp(CMatrix{{0.0, th}, {-th, 0.0}});
  const CMatrix series = oracle::taylor_exp(CMatrix{{0.0, th}, {-th, 0.0}});
  EXPECT_LT(max_abs(rot - series), 1e-15);
  expect_near(rot(0, 0), std::cos(th), 1e-15);
  expect_near(rot(0, 1), std::sin(th), 1e-15);
}

TEST(MatExp, InverseIdentityAndSeriesAgreement) {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const CMatrix a = oracle::random_matrix(rng, n, 1.0);
    EXPECT_LT(max_abs(mat_exp(a) * mat_exp(-a) - CMatrix::identity(n)), 1e-10);
    const CMatrix ref = oracle::taylor_exp(a, 80);
    EXPECT_LT(max_abs(mat_exp(a) - ref), 1e-12 * std::max(1.0, max_abs(ref)));
  }
}

TEST(MatExp, LargeNormScalingAndOverflow) {
  // exp of a scaled rotation generator with ‖M‖ = 40 stays accurate
  const double th = 40.0;
  const CMatrix rot = mat_exp(CMatrix{{0.0, th}, {-th, 0.0}});
  expect_near(rot(0, 0), std::cos(th), 1e-12);
  expect_near(rot(1, 0), -std::sin(th), 1e-12);
  const cplx big[] = {800.0, 1.0};
  EXPECT_THROW(mat_exp(CMatrix::diagonal(big)), LaxError);
}

TEST(Solve, RecoversInverse) {
  std::mt19937_64 rng(19);
  const CMatrix a = CMatrix::identity(5) + oracle::random_matrix(rng, 5, 0.3);
  EXPECT_LT(max_abs(a * inverse(a) - CMatrix::identity(5)), 1e-13);
  EXPECT_THROW(inverse(CMatrix(2)), LaxError);
}
