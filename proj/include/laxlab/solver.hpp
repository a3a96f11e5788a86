#ifndef LAXLAB_SOLVER_HPP
#define LAXLAB_SOLVER_HPP

// Closed-form solution of the linearized dynamics.
//
// Let U solve U̇ = −M U, U(0) = I. Then L = U L0 U⁻¹ whenever L̇ = [L, M],
// and X̃ = U⁻¹ X U obeys Ẋ̃ = U⁻¹(Ẋ − [X, M]) U. Substituting each family's
// X-equation gives an explicit matrix whose spectrum is the particle data:
//
//   CM_RATIONAL   Ẋ̃ = L0                     X̃(t) = X0 + t L0
//   CM_HARMONIC   Z̃ = e^{iλt} Z0, W̃ = e^{−iλt} W0,  X̃ = (Z̃ − W̃) / 2iλ
//   CS            Ẋ̃ = X̃ L0 + L0 X̃            X̃(t) = e^{t L0} X0 e^{t L0}
//   RS            Ẋ̃ = a (X̃ L0 + L0 X̃)        X̃(t) = e^{a t L0} X0 e^{a t L0}
//   RS_PERTURBED  L = e^{iΩt} U L0 U⁻¹, so Ẋ̃ = a e^{iΩt}(X̃ L0 + L0 X̃) and
//                 X̃(t) = e^{a τ L0} X0 e^{a τ L0},  τ(t) = (e^{iΩt} − 1)/(iΩ)
//
// X is diag(x) for CM and diag(exp(2 a z)) otherwise, so the positions are the
// eigenvalues of X̃ or their logarithms divided by 2a. τ is 2π/Ω-periodic,
// which is the periodicity of every orbit in closed form.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <numeric>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "laxlab/error.hpp"
#include "laxlab/integrate.hpp"
#include "laxlab/linalg.hpp"
#include "laxlab/observables.hpp"
#include "laxlab/systems.hpp"

namespace laxlab {

/// Verbatim t = 0 data of a trajectory.
struct AlgebraicSolution {
  SystemSpec spec;
  PhaseState initial;
  CMatrix L0;
  CMatrix X0;
  std::optional<CMatrix> Z0;
  std::optional<CMatrix> W0;
  CharPolyCoeffs A_coeffs;
  ObservableFrame frame0;
};

inline AlgebraicSolution make_solution(const SystemSpec& spec, const PhaseState& s0) {
  spec.validate();
  if (!supports_lax(spec)) throw UnsupportedFamilyError("the algebraic solver needs a Lax matrix");
  LaxData d = build_lax(spec, s0);
  ObservableFrame f0 = frame(spec, s0);
  AlgebraicSolution sol{spec, s0, std::move(d.L), std::move(d.X), std::move(d.Z), std::move(d.W),
                        f0.A_coeffs, std::move(f0)};
  return sol;
}

/// G(t) for the families with autonomous linear G-dynamics:
/// CS and RS via exp(tA)·G(0); CM_RATIONAL G_k(0) + t F_{k+1};
/// CM_HARMONIC e^{−iλt} G_k(0).
inline std::vector<cplx> evolve_G(const AlgebraicSolution& sol, double t) {
  const auto& spec = sol.spec;
  const auto& f0 = sol.frame0;
  const std::size_t n = spec.n;
  switch (spec.family) {
    case Family::CmRational: {
      const auto fx = f0.F_extended();
      std::vector<cplx> g(n);
      for (std::size_t k = 0; k < n; ++k) g[k] = f0.G[k] + t * fx[k + 1];
      return g;
    }
    case Family::CmHarmonic: {
      const cplx ph = std::exp(-kI * spec.require_lambda() * t);
      std::vector<cplx> g(f0.G);
      for (auto& x : g) x *= ph;
      return g;
    }
    case Family::Cs:
    case Family::Rs: {
      if (t == 0.0) return f0.G;
      const CMatrix gen = linear_evolution_matrix(spec, sol.A_coeffs, false);
      return mat_exp(gen * cplx{t}) * std::span<const cplx>(f0.G);
    }
    case Family::RsPerturbed:
      throw UnsupportedFamilyError("RS_PERTURBED coefficients rotate; use evolve_G_perturbed");
  }
  throw UnsupportedFamilyError("evolve_G");
}

/// G(t) for RS_PERTURBED. With F_k(t) = e^{iΩkt}F_k(0) the char-poly
/// coefficients rotate as A_i(t) = e^{iΩ(n−i)t} A_i(0), and
///   Ġ_k     = 2a G_{k+1} + iΩk G_k                (k < n−1)
///   Ġ_{n−1} = 2a Σ A_i(t) G_i + iΩ(n−1) G_{n−1}
/// is stepped with a tight embedded Runge–Kutta pair.
inline std::vector<cplx> evolve_G_perturbed(const AlgebraicSolution& sol, double t, double tol = 1e-13) {
  const auto& spec = sol.spec;
  if (spec.family != Family::RsPerturbed) throw UnsupportedFamilyError("evolve_G_perturbed needs RS_PERTURBED");
  if (t == 0.0) return sol.frame0.G;
  const std::size_t n = spec.n;
  const cplx scale = companion_scale(spec);
  const double om = spec.require_omega();
  const std::vector<cplx> a0 = sol.A_coeffs.coeffs;
  const VectorField rhs = [&](double tt, const StateVec& g) {
    StateVec d(n);
    for (std::size_t k = 0; k + 1 < n; ++k) d[k] = scale * g[k + 1];
    cplx closure{};
    for (std::size_t i = 0; i < n; ++i)
      closure += a0[i] * std::exp(kI * om * static_cast<double>(n - i) * tt) * g[i];
    d[n - 1] = scale * closure;
    for (std::size_t k = 0; k < n; ++k) d[k] += kI * om * static_cast<double>(k) * g[k];
    return d;
  };
  const double times[] = {t};
  return integrate_vector_field(rhs, 0.0, sol.frame0.G, times, tol, tol).front();
}

/// τ(t) = (e^{iΩt} − 1)/(iΩ); the integral of e^{iΩs} over [0, t].
inline cplx perturbed_clock(double omega, double t) {
  const cplx iw = kI * omega;
  return (std::exp(iw * t) - 1.0) / iw;
}

namespace detail {

// Permutation p minimising Σ|next[p[j]] − prev[j]|²: brute force up to 7.
inline std::vector<std::size_t> match_eigenvalues(const std::vector<cplx>& prev, const std::vector<cplx>& next) {
  const std::size_t n = prev.size();
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  if (n <= 7) {
    std::vector<std::size_t> best = p;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
      double c = 0.0;
      for (std::size_t j = 0; j < n && c < best_cost; ++j) c += std::norm(next[p[j]] - prev[j]);
      if (c < best_cost) {
        best_cost = c;
        best = p;
      }
    } while (std::next_permutation(p.begin(), p.end()));
    return best;
  }
  std::vector<bool> used(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t arg = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!used[i] && (arg == n || std::abs(next[i] - prev[j]) < std::abs(next[arg] - prev[j]))) arg = i;
    used[arg] = true;
    p[j] = arg;
  }
  return p;
}

// exp(s·c·L0) X0 exp(s·c·L0) for the exponential families.
inline CMatrix conjugated_exponential(const AlgebraicSolution& sol, cplx c) {
  const CMatrix e = mat_exp(sol.L0 * (exponent_scale(sol.spec) * c));
  return e * sol.X0 * e;
}

inline cplx family_clock(const SystemSpec& spec, double t) {
  return spec.family == Family::RsPerturbed ? perturbed_clock(spec.require_omega(), t) : cplx{t};
}

// Continues z_j = log(w_j)/(2s) from t = 0 to t, refining the step whenever an
// eigenvalue turns by more than π/4 or rescales by more than e^{1/2} between
// consecutive evaluations.
inline std::vector<cplx> track_log_positions(const AlgebraicSolution& sol, double t) {
  const SystemSpec& spec = sol.spec;
  const cplx s2 = 2.0 * exponent_scale(spec);
  const std::size_t n = spec.n;
  std::vector<cplx> z = sol.initial.z;
  std::vector<cplx> w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = std::exp(s2 * z[j]);

  double u = 0.0;
  double du = 1.0 / 32.0;
  while (u < 1.0) {
    const double u_next = std::min(1.0, u + du);
    const auto ev = eigenvalues(conjugated_exponential(sol, family_clock(spec, u_next * t)));
    const auto p = match_eigenvalues(w, ev);
    bool ok = true;
    for (std::size_t j = 0; j < n && ok; ++j) {
      if (ev[p[j]] == cplx{}) throw BranchError("zero eigenvalue in exponential coordinates");
      const cplx lr = std::log(ev[p[j]] / w[j]);
      ok = std::abs(lr.imag()) <= std::numbers::pi / 4.0 && std::abs(lr.real()) <= 0.5;
    }
    if (!ok) {
      du *= 0.5;
      if (du < 1e-9) throw BranchError("logarithm branch ambiguous near t = " + std::to_string(u * t));
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) {
      z[j] += std::log(ev[p[j]] / w[j]) / s2;
      w[j] = ev[p[j]];
    }
    u = u_next;
    du = std::min(2.0 * du, 1.0 / 16.0);
  }
  // Re-anchor on the principal logarithm to shed accumulated rounding.
  const cplx period = 2.0 * std::numbers::pi * kI / s2;
  for (std::size_t j = 0; j < n; ++j) {
    const cplx zp = std::log(w[j]) / s2;
    const double m = std::round(((z[j] - zp) / period).real());
    z[j] = zp + m * period;
  }
  return z;
}

}  // namespace detail

/// Positions at time t, canonically ordered, read off the spectrum of X̃(t).
inline std::vector<cplx> spectral_positions(const AlgebraicSolution& sol, double t) {
  const SystemSpec& spec = sol.spec;
  std::vector<cplx> z;
  if (t == 0.0) {
    z = sol.initial.z;
    canonical_sort(z);
    return z;
  }
  switch (spec.family) {
    case Family::CmRational:
      z = eigenvalues(sol.X0 + sol.L0 * cplx{t});
      break;
    case Family::CmHarmonic: {
      const cplx il = kI * spec.require_lambda();
      const CMatrix xt = (std::exp(il * t) * *sol.Z0 - std::exp(-il * t) * *sol.W0) * (1.0 / (2.0 * il));
      z = eigenvalues(xt);
      break;
    }
    case Family::Cs:
    case Family::Rs:
    case Family::RsPerturbed:
      z = detail::track_log_positions(sol, t);
      break;
  }
  canonical_sort(z);
  return z;
}

/// Largest distance between canonically ordered position sets.
inline double set_distance(std::vector<cplx> a, std::vector<cplx> b) {
  canonical_sort(a);
  canonical_sort(b);
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

/// max over j of |z_j − z'_j| and |v_j − v'_j|.
inline double state_distance(const PhaseState& a, const PhaseState& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.z.size(); ++j)
    d = std::max({d, std::abs(a.z[j] - b.z[j]), std::abs(a.v[j] - b.v[j])});
  return d;
}

struct PeriodReport {
  double T_tested = 0.0;  // 2π/Ω
  double return_error = 0.0;
  std::vector<double> per_invariant_rotation_error;  // |F_k(T) − F_k(0)|
  double T_alternative = 0.0;  // Ω
  std::optional<double> return_error_alternative;
  std::optional<std::string> alternative_fault;
};

/// Integrates RS_PERTURBED over one period 2π/Ω and over Ω and reports how far
/// the state is from where it started.
inline PeriodReport period_report(const SystemSpec& spec, const PhaseState& s0, IntegratorOptions opts = {}) {
  if (spec.family != Family::RsPerturbed) throw UnsupportedFamilyError("period_report needs RS_PERTURBED");
  const double om = spec.require_omega();
  PeriodReport rep;
  rep.T_tested = 2.0 * std::numbers::pi / om;
  rep.T_alternative = om;

  opts.t_end = rep.T_tested;
  opts.sample_every = rep.T_tested;
  const Trajectory tr = integrate(spec, s0, opts);
  if (!tr.complete()) std::rethrow_exception(tr.fault->error);
  rep.return_error = state_distance(tr.back().state, s0);
  if (tr.back().frame) {
    const auto& f0 = tr.samples.front().frame->F;
    const auto& f1 = tr.back().frame->F;
    for (std::size_t k = 0; k < f0.size(); ++k) rep.per_invariant_rotation_error.push_back(std::abs(f1[k] - f0[k]));
  }

  opts.t_end = rep.T_alternative;
  opts.sample_every = rep.T_alternative;
  const Trajectory alt = integrate(spec, s0, opts);
  if (alt.complete())
    rep.return_error_alternative = state_distance(alt.back().state, s0);
  else
    rep.alternative_fault = alt.fault->message;
  return rep;
}

}  // namespace laxlab

#endif  // LAXLAB_SOLVER_HPP
