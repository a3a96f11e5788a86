#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "laxlab/solver.hpp"

using namespace laxlab;

namespace {

PhaseState make_state(std::vector<cplx> z, std::vector<cplx> v) {
  PhaseState s;
  s.z = std::move(z);
  s.v = std::move(v);
  return s;
}

Trajectory reference(const SystemSpec& spec, const PhaseState& s0, double t_end, double every) {
  IntegratorOptions o;
  o.atol = o.rtol = 1e-12;
  o.t_end = t_end;
  o.sample_every = every;
  return integrate(spec, s0, o);
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(EvolveG, CmRationalExample) {
  const auto sol = make_solution(SystemSpec::cm_rational(2, 1.0), make_state({0.0, 1.0}, {2.0, 3.0}));
  const auto g = evolve_G(sol, 1.0);
  EXPECT_LT(std::abs(g[0] - 6.0), 1e-13);
  EXPECT_LT(std::abs(g[1] - 18.0), 1e-12);
}

TEST(EvolveG, MatchesIntegratedTrajectory) {
  for (const auto& c : fixtures::lax_cases(3)) {
    if (c.spec.family == Family::RsPerturbed) continue;
    const auto sol = make_solution(c.spec, c.state);
    const auto traj = reference(c.spec, c.state, 2.0, 0.5);
    ASSERT_TRUE(traj.complete()) << c.name;
    for (const auto& s : traj.samples) {
      const auto g = evolve_G(sol, s.state.t);
      for (std::size_t k = 0; k < 3; ++k) EXPECT_LT(rel(g[k], s.frame->G[k]), 1e-8) << c.name << " k=" << k;
    }
  }
}

TEST(EvolveG, PerturbedNeedsItsOwnPath) {
  const auto c = fixtures::lax_cases(2).back();
  const auto sol = make_solution(c.spec, c.state);
  EXPECT_THROW(evolve_G(sol, 1.0), UnsupportedFamilyError);
  EXPECT_THROW(evolve_G_perturbed(make_solution(SystemSpec::cs(2, 1.0), fixtures::cs_state(2)), 1.0),
               UnsupportedFamilyError);
}

TEST(EvolveGPerturbed, MatchesTrajectoryAndIsPeriodic) {
  for (const auto& c : fixtures::lax_cases(3)) {
    if (c.spec.family != Family::RsPerturbed) continue;
    const auto sol = make_solution(c.spec, c.state);
    const double T = 2.0 * std::numbers::pi / *c.spec.omega;
    const auto traj = reference(c.spec, c.state, T, T / 8.0);
    ASSERT_TRUE(traj.complete()) << c.name;
    for (const auto& s : traj.samples) {
      const auto g = evolve_G_perturbed(sol, s.state.t);
      for (std::size_t k = 0; k < 3; ++k) EXPECT_LT(rel(g[k], s.frame->G[k]), 1e-8) << c.name;
    }
    const auto gT = evolve_G_perturbed(sol, T);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_LT(rel(gT[k], sol.frame0.G[k]), 1e-8) << c.name;
  }
}

TEST(EvolveGPerturbed, SmallOmegaLimit) {
  const auto s0 = fixtures::rs_state(3);
  const auto plain = make_solution(SystemSpec::rs(3, RsCase::V, 0.8, 0.6), s0);
  const auto slow = make_solution(SystemSpec::rs_perturbed(3, RsCase::V, 1e-7, 0.8, 0.6), s0);
  const auto a = evolve_G(plain, 1.5);
  const auto b = evolve_G_perturbed(slow, 1.5);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_LT(rel(b[k], a[k]), 1e-5);
}

TEST(PerturbedClock, ValuesAndPeriod) {
  EXPECT_LT(std::abs(perturbed_clock(2.0, 0.0)), 1e-300);
  EXPECT_LT(std::abs(perturbed_clock(1e-9, 0.7) - 0.7), 1e-9);
  const double om = 1.3;
  EXPECT_LT(std::abs(perturbed_clock(om, 2.0 * std::numbers::pi / om)), 1e-12);
  // quarter period: (i − 1)/(iΩ) = (1 + i)/Ω
  EXPECT_LT(std::abs(perturbed_clock(om, std::numbers::pi / (2.0 * om)) - cplx(1.0, 1.0) / om), 1e-14);
}

TEST(SpectralPositions, MatchIntegratedTrajectory) {
  for (std::size_t n : {2u, 3u, 4u})
    for (const auto& c : fixtures::lax_cases(n)) {
      const auto sol = make_solution(c.spec, c.state);
      const auto traj = reference(c.spec, c.state, 2.0, 0.25);
      ASSERT_TRUE(traj.complete()) << c.name;
      for (const auto& s : traj.samples)
        EXPECT_LT(set_distance(spectral_positions(sol, s.state.t), s.state.z), 1e-8)
            << c.name << " n=" << n << " t=" << s.state.t;
    }
}

TEST(SpectralPositions, HarmonicPeriodReturns) {
  const double lambda = 0.9;
  const auto spec = SystemSpec::cm_harmonic(4, 0.7, lambda);
  const auto s0 = fixtures::cm_state(4);
  const auto sol = make_solution(spec, s0);
  EXPECT_LT(set_distance(spectral_positions(sol, 2.0 * std::numbers::pi / lambda), s0.z), 1e-10);
  // half a period reflects through the origin
  std::vector<cplx> neg;
  for (const auto& z : s0.z) neg.push_back(-z);
  EXPECT_LT(set_distance(spectral_positions(sol, std::numbers::pi / lambda), neg), 1e-10);
}

TEST(SpectralPositions, PerturbedOrbitsClose) {
  for (const auto& c : fixtures::lax_cases(4)) {
    if (c.spec.family != Family::RsPerturbed) continue;
    const auto sol = make_solution(c.spec, c.state);
    EXPECT_LT(set_distance(spectral_positions(sol, 2.0 * std::numbers::pi / *c.spec.omega), c.state.z), 1e-10)
        << c.name;
  }
}

TEST(SpectralPositions, RationalScatteringVelocities) {
  // z(t)/t tends to the spectrum of L0, with an O(1/t) remainder.
  const auto spec = SystemSpec::cm_rational(4, 0.7);
  const auto s0 = fixtures::cm_state(4);
  const auto sol = make_solution(spec, s0);
  const double t = 1e3;
  auto z = spectral_positions(sol, t);
  for (auto& x : z) x /= t;
  EXPECT_LT(set_distance(z, eigenvalues(sol.L0)), 1e-2);
  // and the eigenvalues of L0 are the spectrum of L at every time (isospectral)
  const auto traj = reference(spec, s0, 3.0, 3.0);
  EXPECT_LT(set_distance(eigenvalues(build_lax(spec, traj.back().state).L), eigenvalues(sol.L0)), 1e-9);
}

TEST(SpectralPositions, RejectsUnsupported) {
  EXPECT_THROW(make_solution(SystemSpec::rs(2, RsCase::I), make_state({0.0, 1.0}, {1.0, 1.0})),
               UnsupportedFamilyError);
}

TEST(PeriodReport, SingleParticleReturnsExactly) {
  // n = 1: ż = v0 e^{iΩt} exactly, so z(T) = z0.
  const auto spec = SystemSpec::rs_perturbed(1, RsCase::III, 1.7, 0.5);
  const auto s0 = make_state({cplx{0.2, 0.1}}, {cplx{0.6, -0.3}});
  IntegratorOptions o;
  o.atol = o.rtol = 1e-12;
  const auto rep = period_report(spec, s0, o);
  EXPECT_NEAR(rep.T_tested, 2.0 * std::numbers::pi / 1.7, 1e-15);
  EXPECT_LT(rep.return_error, 1e-10);
  ASSERT_TRUE(rep.return_error_alternative);
  // max of |Δz| = |v0 τ(Ω)| and |Δv| = |v0 (e^{iΩ²} − 1)|
  const cplx v0{0.6, -0.3};
  const double dz = std::abs(v0 * perturbed_clock(1.7, 1.7));
  const double dv = std::abs(v0 * (std::exp(kI * 1.7 * 1.7) - 1.0));
  EXPECT_NEAR(*rep.return_error_alternative, std::max(dz, dv), 1e-9);
}

TEST(PeriodReport, ManyBodyReturn) {
  const auto spec = SystemSpec::rs_perturbed(2, RsCase::V, 1.0, 0.8, 0.6);
  const auto rep = period_report(spec, fixtures::rs_periodic_state(2));
  EXPECT_LT(rep.return_error, 1e-8);
  for (double e : rep.per_invariant_rotation_error) EXPECT_LT(e, 1e-8);
  ASSERT_TRUE(rep.return_error_alternative);
  EXPECT_GT(*rep.return_error_alternative, 1e-3);
}
