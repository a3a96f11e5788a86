#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "laxlab/observables.hpp"

using namespace laxlab;

namespace {

void expect_near(cplx a, cplx b, double tol) { EXPECT_LT(std::abs(a - b), tol) << a << " vs " << b; }

PhaseState make_state(std::vector<cplx> z, std::vector<cplx> v) {
  PhaseState s;
  s.z = std::move(z);
  s.v = std::move(v);
  return s;
}

// Phase-space point moved by h along the vector field.
PhaseState nudge(const SystemSpec& spec, const PhaseState& s, double h) {
  const auto r = eom_rhs(spec, s);
  PhaseState out = s;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.z[i] += h * r.dz[i];
    out.v[i] += h * r.dv[i];
  }
  return out;
}

}  // namespace

TEST(Frame, CmRationalExample) {
  const auto spec = SystemSpec::cm_rational(2, 1.0);
  const auto f = frame(spec, make_state({0.0, 1.0}, {2.0, 3.0}));
  expect_near(f.F[0], 2.0, 1e-15);
  expect_near(f.F[1], 5.0, 1e-15);
  expect_near(f.F_n, 15.0, 1e-14);
  expect_near(f.G[0], 1.0, 1e-15);
  expect_near(f.G[1], 3.0, 1e-15);
  ASSERT_EQ(f.H.size(), 1u);
  expect_near(f.H[0], 0.0, 1e-14);

  const auto r = predicted_rates(spec, f);
  expect_near(r.dG[0], 5.0, 1e-15);
  expect_near(r.dG[1], 15.0, 1e-13);
  expect_near(r.dF[0], 0.0, 0.0 + 1e-300);
}

TEST(Frame, SingleParticleHasNoSuperintegrals) {
  const auto f = frame(SystemSpec::cm_rational(1, 1.0), make_state({0.4}, {1.5}));
  EXPECT_TRUE(f.H.empty());
  expect_near(f.F[0], 1.0, 0.0 + 1e-300);
  expect_near(f.G[0], 0.4, 1e-15);
}

TEST(Frame, DirectPowerMatchesClosure) {
  for (const auto& c : fixtures::lax_cases(4)) {
    const auto f = frame(c.spec, c.state);
    const double scale = std::max(1.0, std::abs(f.F_n));
    EXPECT_LT(std::abs(f.A_coeffs.close(f.F) - f.F_n), 1e-10 * scale) << c.name;
    EXPECT_LT(std::abs(f.A_coeffs.close(f.G) - f.G_n), 1e-10 * std::max(1.0, std::abs(f.G_n))) << c.name;
  }
}

TEST(Frame, RationalRsIsUnsupported) {
  const auto spec = SystemSpec::rs(2, RsCase::II, std::nullopt, 0.5);
  EXPECT_THROW(frame(spec, make_state({0.0, 1.0}, {1.0, 1.0})), UnsupportedFamilyError);
}

TEST(Superintegrals, Formula) {
  const cplx F[] = {3.0, 1.0, 2.0, 5.0};
  const cplx G[] = {0.5, 4.0, -1.0};
  const auto h = superintegrals(F, G);
  ASSERT_EQ(h.size(), 2u);
  expect_near(h[0], 1.0 * 4.0 - 2.0 * 0.5, 1e-15);
  expect_near(h[1], 2.0 * -1.0 - 5.0 * 4.0, 1e-15);
  const cplx Fshort[] = {3.0, 1.0};
  const cplx Gshort[] = {0.5, 4.0};
  EXPECT_THROW(superintegrals(Fshort, Gshort), LaxError);
}

TEST(Companion, Examples) {
  // L = I₂: λ² = 2λ − 1, so A = (−1, 2)
  const auto cs = SystemSpec::cs(2, 1.0);
  const auto c = companion(cs, char_poly(CMatrix::identity(2)));
  expect_near(c.A(0, 0), 0.0, 1e-300);
  expect_near(c.A(0, 1), 2.0, 1e-15);
  expect_near(c.A(1, 0), -2.0, 1e-15);
  expect_near(c.A(1, 1), 4.0, 1e-15);

  expect_near(companion_scale(SystemSpec::rs(2, RsCase::III, 0.5)), 1.0, 1e-15);
  expect_near(companion_scale(SystemSpec::rs(2, RsCase::V, 0.5, 0.3)), 1.0, 1e-15);
  // case iv is case v at half the range with r = 1
  expect_near(companion_scale(SystemSpec::rs(2, RsCase::IV, 0.5)), 0.5, 1e-15);
  EXPECT_THROW(companion_scale(SystemSpec::cm_rational(2, 1.0)), UnsupportedFamilyError);
  EXPECT_THROW(companion(CharPolyCoeffs{}, 1.0), LaxError);
}

TEST(Companion, PerturbedDiagonal) {
  const auto spec = SystemSpec::rs_perturbed(3, RsCase::III, 2.0, 0.5);
  const cplx d[] = {1.0, 2.0, 3.0};
  const auto coeffs = char_poly(CMatrix::diagonal(d));
  const CMatrix plain = linear_evolution_matrix(spec, coeffs, false);
  const CMatrix pert = linear_evolution_matrix(spec, coeffs, true);
  for (std::size_t k = 0; k < 3; ++k) expect_near(pert(k, k) - plain(k, k), cplx(0.0, 2.0 * k), 1e-15);
  EXPECT_THROW(linear_evolution_matrix(SystemSpec::cs(3, 1.0), coeffs, true), UnsupportedFamilyError);
}

TEST(Companion, ClosesTheGDynamics) {
  for (const auto& c : fixtures::lax_cases(4)) {
    if (is_cm(c.spec.family)) continue;
    const auto f = frame(c.spec, c.state);
    const auto r = predicted_rates(c.spec, f);
    const bool pert = c.spec.family == Family::RsPerturbed;
    const auto applied = linear_evolution_matrix(c.spec, f.A_coeffs, pert) * std::span<const cplx>(f.G);
    for (std::size_t k = 0; k < 4; ++k) expect_near(applied[k], r.dG[k], 1e-12);
  }
}

TEST(PredictedRates, MatchDirectionalDerivative) {
  // d/dt along the flow by central differences in phase space, no integrator.
  const double h = 1e-5;
  for (std::size_t n : {2u, 3u, 4u})
    for (const auto& c : fixtures::lax_cases(n)) {
      const auto f0 = frame(c.spec, c.state);
      const auto fp = frame(c.spec, nudge(c.spec, c.state, h));
      const auto fm = frame(c.spec, nudge(c.spec, c.state, -h));
      const auto r = predicted_rates(c.spec, f0);
      for (std::size_t k = 0; k < n; ++k) {
        const cplx dF = (fp.F[k] - fm.F[k]) / (2.0 * h);
        const cplx dG = (fp.G[k] - fm.G[k]) / (2.0 * h);
        EXPECT_LT(std::abs(dF - r.dF[k]), 1e-6 * std::max(1.0, std::abs(r.dF[k]))) << c.name << " F" << k;
        EXPECT_LT(std::abs(dG - r.dG[k]), 1e-6 * std::max(1.0, std::abs(r.dG[k]))) << c.name << " G" << k;
      }
    }
}

TEST(Superintegrals, ConstantAlongTheRationalFlow) {
  const double h = 1e-5;
  const auto spec = SystemSpec::cm_rational(4, 0.7);
  const auto s = fixtures::cm_state(4);
  const auto hp = frame(spec, nudge(spec, s, h)).H;
  const auto hm = frame(spec, nudge(spec, s, -h)).H;
  for (std::size_t k = 0; k < hp.size(); ++k) EXPECT_LT(std::abs(hp[k] - hm[k]) / (2.0 * h), 1e-6);
}
