#ifndef LAXLAB_OBSERVABLES_HPP
#define LAXLAB_OBSERVABLES_HPP

// Linearizing coordinates F_k, G_k, the CM superintegrals H_k, the companion
// generator of the closed G-dynamics and the predicted time derivatives.
//
//   family         F_k          G_k          Ḟ_k        Ġ_k
//   CM_RATIONAL    tr L^k       tr X L^k     0          F_{k+1}
//   CM_HARMONIC    tr Z P^k     tr W P^k     iλ F_k     −iλ G_k
//   CS             tr L^k       tr X L^k     0          2 G_{k+1}
//   RS             tr L^k       tr X L^k     0          2a G_{k+1}
//   RS_PERTURBED   tr L^k       tr X L^k     iΩk F_k    2a G_{k+1} + iΩk G_k
//
// k runs over 0..n−1; index n is closed by Cayley–Hamilton.

#include <cstddef>
#include <span>
#include <vector>

#include "laxlab/error.hpp"
#include "laxlab/linalg.hpp"
#include "laxlab/systems.hpp"

namespace laxlab {

struct ObservableFrame {
  double t = 0.0;
  std::vector<cplx> F;  // F_0..F_{n-1}
  std::vector<cplx> G;  // G_0..G_{n-1}
  cplx F_n;             // computed directly, not by closure
  cplx G_n;
  std::vector<cplx> H;  // H_1..H_{n-1}
  CharPolyCoeffs A_coeffs;

  /// F_0..F_n.
  std::vector<cplx> F_extended() const {
    std::vector<cplx> f = F;
    f.push_back(F_n);
    return f;
  }
};

/// H_k = F_k G_k − F_{k+1} G_{k−1} for k = 1..n−1, n = G.size().
inline std::vector<cplx> superintegrals(std::span<const cplx> F, std::span<const cplx> G) {
  const std::size_t n = G.size();
  if (n < 2) return {};
  if (F.size() < n + 1) throw LaxError("superintegrals: need F_0..F_n");
  std::vector<cplx> h(n - 1);
  for (std::size_t k = 1; k < n; ++k) h[k - 1] = F[k] * G[k] - F[k + 1] * G[k - 1];
  return h;
}

inline ObservableFrame frame(const SystemSpec& spec, const PhaseState& s) {
  if (!supports_lax(spec))
    throw UnsupportedFamilyError("observables need a Lax matrix; rational RS cases have none");
  const LaxData d = build_lax(spec, s);
  const std::size_t n = spec.n;
  ObservableFrame f;
  f.t = s.t;
  f.F.resize(n);
  f.G.resize(n);

  const bool harmonic = spec.family == Family::CmHarmonic;
  const CMatrix& base = harmonic ? *d.P : d.L;
  const CMatrix& left_g = harmonic ? *d.W : d.X;

  CMatrix power = CMatrix::identity(n);
  for (std::size_t k = 0; k <= n; ++k) {
    cplx fk;
    if (harmonic)
      fk = trace_product(*d.Z, power);
    else
      fk = k == 0 ? cplx(static_cast<double>(n)) : trace(power);
    const cplx gk = trace_product(left_g, power);
    if (k < n) {
      f.F[k] = fk;
      f.G[k] = gk;
      power = power * base;
    } else {
      f.F_n = fk;
      f.G_n = gk;
    }
  }
  f.A_coeffs = char_poly(base);
  f.H = superintegrals(f.F_extended(), f.G);
  return f;
}

/// Companion generator: scale on the superdiagonal, scale·A_{j} on the last row.
struct CompanionMatrix {
  CMatrix A;
  cplx scale;
};

inline CompanionMatrix companion(const CharPolyCoeffs& coeffs, cplx scale) {
  const std::size_t n = coeffs.size();
  if (n == 0) throw LaxError("companion: empty coefficient list");
  CompanionMatrix c{CMatrix(n), scale};
  for (std::size_t i = 0; i + 1 < n; ++i) c.A(i, i + 1) = scale;
  for (std::size_t j = 0; j < n; ++j) c.A(n - 1, j) = scale * coeffs[j];
  return c;
}

/// Factor in Ġ_k = scale · G_{k+1}: 2 for CS, 2a for RS (a resolved, see rs_lax_params).
inline cplx companion_scale(const SystemSpec& spec) {
  if (spec.family == Family::Cs) return 2.0;
  if (is_rs(spec.family)) return 2.0 * rs_lax_params(spec).a;
  throw UnsupportedFamilyError("G_k of the CM families is not closed by a companion matrix");
}

inline CompanionMatrix companion(const SystemSpec& spec, const CharPolyCoeffs& coeffs) {
  return companion(coeffs, companion_scale(spec));
}

struct ObservableRates {
  std::vector<cplx> dF;
  std::vector<cplx> dG;
};

inline ObservableRates predicted_rates(const SystemSpec& spec, const ObservableFrame& fr) {
  if (!supports_lax(spec)) throw UnsupportedFamilyError("no observables for rational RS cases");
  const std::size_t n = fr.G.size();
  ObservableRates r{std::vector<cplx>(n), std::vector<cplx>(n)};
  auto g_next = [&](std::size_t k) { return k + 1 < n ? fr.G[k + 1] : fr.A_coeffs.close(fr.G); };
  auto f_next = [&](std::size_t k) { return k + 1 < n ? fr.F[k + 1] : fr.A_coeffs.close(fr.F); };
  switch (spec.family) {
    case Family::CmRational:
      for (std::size_t k = 0; k < n; ++k) r.dG[k] = f_next(k);
      break;
    case Family::CmHarmonic: {
      const cplx il = kI * spec.require_lambda();
      for (std::size_t k = 0; k < n; ++k) {
        r.dF[k] = il * fr.F[k];
        r.dG[k] = -il * fr.G[k];
      }
      break;
    }
    case Family::Cs:
    case Family::Rs: {
      const cplx scale = companion_scale(spec);
      for (std::size_t k = 0; k < n; ++k) r.dG[k] = scale * g_next(k);
      break;
    }
    case Family::RsPerturbed: {
      const cplx scale = companion_scale(spec);
      const cplx iom = kI * spec.require_omega();
      for (std::size_t k = 0; k < n; ++k) {
        const double kk = static_cast<double>(k);
        r.dF[k] = iom * kk * fr.F[k];
        r.dG[k] = scale * g_next(k) + iom * kk * fr.G[k];
      }
      break;
    }
  }
  return r;
}

/// Generator of Ġ = A G at frozen coefficients. For RS_PERTURBED with the
/// flag set, iΩ·diag(0, 1, ..., n−1) is added; the coefficients themselves
/// rotate in that family, so exact evolution lives in the solver.
inline CMatrix linear_evolution_matrix(const SystemSpec& spec, const CharPolyCoeffs& coeffs,
                                       bool with_perturbation) {
  CMatrix a = companion(spec, coeffs).A;
  if (with_perturbation) {
    if (spec.family != Family::RsPerturbed)
      throw UnsupportedFamilyError("perturbation term only exists for RS_PERTURBED");
    const cplx iom = kI * spec.require_omega();
    for (std::size_t k = 0; k < a.size(); ++k) a(k, k) += iom * static_cast<double>(k);
  }
  return a;
}

}  // namespace laxlab

#endif  // LAXLAB_OBSERVABLES_HPP
