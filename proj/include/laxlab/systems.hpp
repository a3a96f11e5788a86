#ifndef LAXLAB_SYSTEMS_HPP
#define LAXLAB_SYSTEMS_HPP

// The particle families: parameters, equations of motion, energies and the
// Lax-type matrices L, M, X (plus Z, W, P for the harmonic Calogero–Moser
// system).
//
// Conventions used throughout:
//   CM_RATIONAL   H = ½Σy² + g² Σ_{i<j} (x_i−x_j)^−2
//   CM_HARMONIC   same + (λ²/2) Σ x²
//   CS            H = ½Σy² + g² Σ_{i<j} sinh^−2(x_i−x_j)
//   RS            z̈_j = Σ_{k≠j} ż_j ż_k f(z_j − z_k)
//   RS_PERTURBED  z̈_j = iΩ ż_j + Σ_{k≠j} ż_j ż_k f(z_j − z_k)
// With these, L̇ = [L,M] + extra and Ẋ = [X,M] + c[X,L]_+ + δ·L hold exactly
// (see lax_residuals).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "laxlab/error.hpp"
#include "laxlab/linalg.hpp"

namespace laxlab {

enum class Family { CmRational, CmHarmonic, Cs, Rs, RsPerturbed };

/// Interaction function selector for the Ruijsenaars–Schneider families.
enum class RsCase { I, II, III, IV, V };

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::CmRational: return "CM_RATIONAL";
    case Family::CmHarmonic: return "CM_HARMONIC";
    case Family::Cs: return "CS";
    case Family::Rs: return "RS";
    case Family::RsPerturbed: return "RS_PERTURBED";
  }
  return "?";
}

inline std::string_view to_string(RsCase c) {
  switch (c) {
    case RsCase::I: return "i";
    case RsCase::II: return "ii";
    case RsCase::III: return "iii";
    case RsCase::IV: return "iv";
    case RsCase::V: return "v";
  }
  return "?";
}

inline Family parse_family(std::string_view s) {
  for (Family f : {Family::CmRational, Family::CmHarmonic, Family::Cs, Family::Rs, Family::RsPerturbed})
    if (to_string(f) == s) return f;
  throw SpecError("unknown family '" + std::string(s) + "'");
}

inline RsCase parse_rs_case(std::string_view s) {
  for (RsCase c : {RsCase::I, RsCase::II, RsCase::III, RsCase::IV, RsCase::V})
    if (to_string(c) == s) return c;
  throw SpecError("unknown rs_case '" + std::string(s) + "'");
}

inline bool is_rs(Family f) { return f == Family::Rs || f == Family::RsPerturbed; }
inline bool is_cm(Family f) { return f == Family::CmRational || f == Family::CmHarmonic; }

/// Which family plus its physical parameters. Parameters a family does not
/// use are left empty; use the named constructors, which resolve μ from r.
struct SystemSpec {
  Family family = Family::CmRational;
  std::size_t n = 1;
  std::optional<cplx> g;
  std::optional<cplx> lambda;
  std::optional<cplx> a;
  std::optional<cplx> r;
  std::optional<cplx> mu;
  std::optional<double> omega;
  std::optional<RsCase> rs_case;
  double collision_epsilon = 1e-8;

  static SystemSpec cm_rational(std::size_t n, cplx g) {
    SystemSpec s;
    s.family = Family::CmRational;
    s.n = n;
    s.g = g;
    s.validate();
    return s;
  }

  static SystemSpec cm_harmonic(std::size_t n, cplx g, cplx lambda) {
    SystemSpec s;
    s.family = Family::CmHarmonic;
    s.n = n;
    s.g = g;
    s.lambda = lambda;
    s.validate();
    return s;
  }

  static SystemSpec cs(std::size_t n, cplx g) {
    SystemSpec s;
    s.family = Family::Cs;
    s.n = n;
    s.g = g;
    s.validate();
    return s;
  }

  /// Pass only the parameters the case uses: ii needs r, iii/iv need a, v needs a and r.
  static SystemSpec rs(std::size_t n, RsCase c, std::optional<cplx> a = {}, std::optional<cplx> r = {}) {
    SystemSpec s;
    s.family = Family::Rs;
    s.n = n;
    s.rs_case = c;
    s.a = a;
    s.r = r;
    s.resolve_mu();
    s.validate();
    return s;
  }

  static SystemSpec rs_perturbed(std::size_t n, RsCase c, double omega, std::optional<cplx> a = {},
                                 std::optional<cplx> r = {}) {
    SystemSpec s = rs(n, c, a, r);
    s.family = Family::RsPerturbed;
    s.omega = omega;
    s.validate();
    return s;
  }

  /// μ = arcsinh(i/r)/a on the principal branch (case v only).
  void resolve_mu() {
    if (is_rs(family) && rs_case == RsCase::V && a && r) {
      if (*a == cplx{} || *r == cplx{}) throw SpecError("case v requires nonzero a and r");
      mu = std::asinh(kI / *r) / *a;
    }
  }

  cplx require_g() const { return require(g, "g"); }
  cplx require_lambda() const { return require(lambda, "lambda"); }
  cplx require_a() const { return require(a, "a"); }
  cplx require_r() const { return require(r, "r"); }
  double require_omega() const {
    if (!omega) throw SpecError("parameter Omega is required for " + std::string(to_string(family)));
    return *omega;
  }
  RsCase require_case() const {
    if (!rs_case) throw SpecError("parameter rs_case is required for " + std::string(to_string(family)));
    return *rs_case;
  }

  void validate() const {
    if (n < 1) throw SpecError("n must be at least 1");
    if (!(collision_epsilon > 0.0)) throw SpecError("collision_epsilon must be positive");
    switch (family) {
      case Family::CmHarmonic:
        require_lambda();
        [[fallthrough]];
      case Family::CmRational:
      case Family::Cs:
        require_g();
        return;
      case Family::RsPerturbed:
        if (!(require_omega() > 0.0)) throw SpecError("Omega must be positive");
        [[fallthrough]];
      case Family::Rs: {
        const RsCase c = require_case();
        if (c == RsCase::II || c == RsCase::V) require_r();
        if (c == RsCase::III || c == RsCase::IV || c == RsCase::V) {
          if (require_a() == cplx{}) throw SpecError("a must be nonzero");
        }
        if (c == RsCase::V) {
          const cplx m = require(mu, "mu");
          const cplx target = kI / *r;
          if (std::abs(std::sinh(*a * m) - target) >= 1e-12 * std::max(1.0, std::abs(target)))
            throw SpecError("mu inconsistent with r: sinh(a*mu) must equal i/r");
        }
        return;
      }
    }
  }

 private:
  cplx require(const std::optional<cplx>& p, const char* name) const {
    if (!p) throw SpecError(std::string("parameter ") + name + " is required for " + std::string(to_string(family)));
    return *p;
  }
};

/// Positions (x_i or z_j) and velocities/momenta at time t.
struct PhaseState {
  double t = 0.0;
  std::vector<cplx> z;
  std::vector<cplx> v;

  std::size_t size() const noexcept { return z.size(); }

  double min_separation() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < z.size(); ++i)
      for (std::size_t j = i + 1; j < z.size(); ++j) m = std::min(m, std::abs(z[i] - z[j]));
    return m;
  }

  bool is_finite() const {
    auto ok = [](const cplx& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); };
    return std::isfinite(t) && std::all_of(z.begin(), z.end(), ok) && std::all_of(v.begin(), v.end(), ok);
  }
};

/// Throws CollisionError for the first pair closer than eps, SpecError for a
/// malformed state.
inline void check_state(const SystemSpec& spec, const PhaseState& s) {
  if (s.z.size() != spec.n || s.v.size() != spec.n)
    throw SpecError("phase state has " + std::to_string(s.z.size()) + " positions and " +
                    std::to_string(s.v.size()) + " velocities, expected " + std::to_string(spec.n));
  if (!s.is_finite()) throw SpecError("phase state is not finite");
  for (std::size_t i = 0; i < s.z.size(); ++i)
    for (std::size_t j = i + 1; j < s.z.size(); ++j) {
      const double d = std::abs(s.z[i] - s.z[j]);
      if (d <= spec.collision_epsilon) throw CollisionError(i, j, d);
    }
}

inline constexpr double kPoleTolerance = 1e-12;

namespace detail {

inline cplx guarded_inverse(cplx d, const char* what) {
  if (std::abs(d) < kPoleTolerance) throw PoleError(std::string("pole in ") + what);
  return 1.0 / d;
}

}  // namespace detail

/// The RS interaction f(z) for the cases i–v.
inline cplx interaction_f(RsCase c, cplx z, const SystemSpec& spec) {
  using detail::guarded_inverse;
  switch (c) {
    case RsCase::I:
      return 2.0 * guarded_inverse(z, "f (case i)");
    case RsCase::II: {
      const cplx r = spec.require_r();
      return 2.0 * guarded_inverse(z, "f (case ii)") * guarded_inverse(1.0 + r * r * z * z, "f (case ii)");
    }
    case RsCase::III: {
      const cplx a = spec.require_a();
      return 2.0 * a * std::cosh(a * z) * guarded_inverse(std::sinh(a * z), "f (case iii)");
    }
    case RsCase::IV: {
      const cplx a = spec.require_a();
      return 2.0 * a * guarded_inverse(std::sinh(a * z), "f (case iv)");
    }
    case RsCase::V: {
      const cplx a = spec.require_a();
      const cplx r = spec.require_r();
      const cplx sh = std::sinh(a * z);
      return 2.0 * a * std::cosh(a * z) * guarded_inverse(sh, "f (case v)") *
             guarded_inverse(1.0 + r * r * sh * sh, "f (case v)");
    }
  }
  throw SpecError("unknown RS case");
}

inline cplx interaction_f(const SystemSpec& spec, cplx z) { return interaction_f(spec.require_case(), z, spec); }

/// Time derivative of a phase state.
struct PhaseRate {
  std::vector<cplx> dz;
  std::vector<cplx> dv;
};

inline PhaseRate eom_rhs(const SystemSpec& spec, const PhaseState& s) {
  check_state(spec, s);
  const std::size_t n = spec.n;
  PhaseRate out{s.v, std::vector<cplx>(n)};
  auto& acc = out.dv;
  switch (spec.family) {
    case Family::CmRational:
    case Family::CmHarmonic: {
      const cplx g2 = spec.require_g() * spec.require_g();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i != j) {
            const cplx d = s.z[i] - s.z[j];
            acc[i] += 2.0 * g2 / (d * d * d);
          }
      if (spec.family == Family::CmHarmonic) {
        const cplx l2 = spec.require_lambda() * spec.require_lambda();
        for (std::size_t i = 0; i < n; ++i) acc[i] -= l2 * s.z[i];
      }
      break;
    }
    case Family::Cs: {
      const cplx g2 = spec.require_g() * spec.require_g();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i != j) {
            const cplx d = s.z[i] - s.z[j];
            const cplx sh = std::sinh(d);
            acc[i] += 2.0 * g2 * std::cosh(d) * detail::guarded_inverse(sh * sh * sh, "CS force");
          }
      break;
    }
    case Family::Rs:
    case Family::RsPerturbed: {
      const RsCase c = spec.require_case();
      for (std::size_t j = 0; j < n; ++j) {
        cplx sum{};
        for (std::size_t k = 0; k < n; ++k)
          if (k != j) sum += s.v[k] * interaction_f(c, s.z[j] - s.z[k], spec);
        acc[j] = s.v[j] * sum;
      }
      if (spec.family == Family::RsPerturbed) {
        const double om = spec.require_omega();
        for (std::size_t j = 0; j < n; ++j) acc[j] += kI * om * s.v[j];
      }
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lax data

/// Resolved RS Lax parameters. Case iv is case v at (a/2, r = 1), since
/// 2a/sinh(az) = 2(a/2)·coth((a/2)z)/(1 + sinh²((a/2)z)). Case iii is the
/// r → 0 limit: α = e^{−az}, β = −a.
struct RsLaxParams {
  cplx a;
  bool exponential_limit = false;
  cplx r;
  cplx mu;
};

inline RsLaxParams rs_lax_params(const SystemSpec& spec) {
  if (!is_rs(spec.family)) throw UnsupportedFamilyError("RS Lax parameters requested for a non-RS family");
  switch (spec.require_case()) {
    case RsCase::I:
    case RsCase::II:
      throw UnsupportedFamilyError("rational RS cases (i)/(ii) have no Lax representation here");
    case RsCase::III:
      return {spec.require_a(), true, 0.0, 0.0};
    case RsCase::IV: {
      const cplx a = 0.5 * spec.require_a();
      return {a, false, 1.0, std::asinh(kI) / a};
    }
    case RsCase::V:
      return {spec.require_a(), false, spec.require_r(), spec.mu.value()};
  }
  throw SpecError("unknown RS case");
}

/// Whether build_lax is defined for the family.
inline bool supports_lax(const SystemSpec& spec) {
  if (!is_rs(spec.family)) return true;
  const RsCase c = spec.require_case();
  return c != RsCase::I && c != RsCase::II;
}

/// The exponent scale s in X = diag(exp(2 s z)): 1 for CS, the resolved a for RS.
inline cplx exponent_scale(const SystemSpec& spec) {
  if (spec.family == Family::Cs) return 1.0;
  if (is_rs(spec.family)) return rs_lax_params(spec).a;
  throw UnsupportedFamilyError("X is diag(x) for the CM families");
}

namespace detail {

struct RsKernel {
  RsLaxParams p;

  cplx alpha(cplx z) const {
    if (p.exponential_limit) return std::exp(-p.a * z);
    return std::sinh(p.a * p.mu) * guarded_inverse(std::sinh(p.a * (z + p.mu)), "alpha");
  }
  cplx alpha_prime(cplx z) const {
    if (p.exponential_limit) return -p.a * std::exp(-p.a * z);
    const cplx sh = std::sinh(p.a * (z + p.mu));
    const cplx inv = guarded_inverse(sh, "alpha");
    return -p.a * std::sinh(p.a * p.mu) * std::cosh(p.a * (z + p.mu)) * inv * inv;
  }
  cplx beta(cplx z) const {
    if (p.exponential_limit) return -p.a;
    const cplx sh = std::sinh(p.a * z);
    return -p.a * std::cosh(p.a * p.mu) * guarded_inverse(std::sinh(p.a * p.mu), "beta") *
           guarded_inverse(1.0 + p.r * p.r * sh * sh, "beta");
  }
  cplx gamma(cplx z) const {
    return -p.a * std::cosh(p.a * z) * guarded_inverse(std::sinh(p.a * z), "gamma") * alpha(z);
  }
};

inline std::vector<cplx> principal_sqrt(const std::vector<cplx>& v) {
  std::vector<cplx> s(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) s[i] = std::sqrt(v[i]);
  return s;
}

}  // namespace detail

/// L, M, X at one phase point; Z = L + iλX, W = L − iλX, P = ZW for CM_HARMONIC.
struct LaxData {
  CMatrix L;
  CMatrix M;
  CMatrix X;
  std::optional<CMatrix> Z;
  std::optional<CMatrix> W;
  std::optional<CMatrix> P;
};

/// For the RS families, `branch_signs` (±1 per particle) selects the branch of
/// each (ż_j)^{1/2}; the default is the principal branch. Traces of L^k and
/// X L^k do not depend on the choice.
inline LaxData build_lax(const SystemSpec& spec, const PhaseState& s, std::span<const int> branch_signs = {}) {
  check_state(spec, s);
  const std::size_t n = spec.n;
  LaxData d{CMatrix(n), CMatrix(n), CMatrix(n), {}, {}, {}};
  switch (spec.family) {
    case Family::CmRational:
    case Family::CmHarmonic: {
      const cplx g = spec.require_g();
      for (std::size_t i = 0; i < n; ++i) {
        d.L(i, i) = s.v[i];
        d.X(i, i) = s.z[i];
        for (std::size_t j = 0; j < n; ++j)
          if (i != j) {
            const cplx inv = 1.0 / (s.z[i] - s.z[j]);
            d.L(i, j) = kI * g * inv;
            d.M(i, j) = -kI * g * inv * inv;
            d.M(i, i) += kI * g * inv * inv;
          }
      }
      if (spec.family == Family::CmHarmonic) {
        const cplx il = kI * spec.require_lambda();
        d.Z = d.L + il * d.X;
        d.W = d.L - il * d.X;
        d.P = *d.Z * *d.W;
      }
      break;
    }
    case Family::Cs: {
      const cplx g = spec.require_g();
      for (std::size_t i = 0; i < n; ++i) {
        d.L(i, i) = s.v[i];
        d.X(i, i) = std::exp(2.0 * s.z[i]);
        for (std::size_t j = 0; j < n; ++j)
          if (i != j) {
            const cplx dz = s.z[i] - s.z[j];
            const cplx inv = detail::guarded_inverse(std::sinh(dz), "CS Lax");
            d.L(i, j) = kI * g * inv;
            d.M(i, j) = -kI * g * std::cosh(dz) * inv * inv;
            d.M(i, i) += kI * g * inv * inv;
          }
      }
      break;
    }
    case Family::Rs:
    case Family::RsPerturbed: {
      const detail::RsKernel k{rs_lax_params(spec)};
      auto sq = detail::principal_sqrt(s.v);
      if (!branch_signs.empty()) {
        if (branch_signs.size() != n) throw SpecError("branch_signs must have one entry per particle");
        for (std::size_t j = 0; j < n; ++j) sq[j] *= static_cast<double>(branch_signs[j] < 0 ? -1 : 1);
      }
      for (std::size_t j = 0; j < n; ++j) {
        d.L(j, j) = s.v[j];
        d.X(j, j) = std::exp(2.0 * k.p.a * s.z[j]);
        for (std::size_t m = 0; m < n; ++m)
          if (m != j) {
            const cplx dz = s.z[j] - s.z[m];
            d.L(j, m) = sq[j] * sq[m] * k.alpha(dz);
            d.M(j, m) = sq[j] * sq[m] * k.gamma(dz);
            d.M(j, j) += s.v[m] * k.beta(dz);
          }
      }
      break;
    }
  }
  return d;
}

/// Time derivatives of L and X along the flow, by the chain rule through eom_rhs.
struct LaxRates {
  CMatrix L_dot;
  CMatrix X_dot;
};

inline LaxRates lax_rates(const SystemSpec& spec, const PhaseState& s) {
  const PhaseRate rate = eom_rhs(spec, s);
  const std::size_t n = spec.n;
  LaxRates out{CMatrix(n), CMatrix(n)};
  switch (spec.family) {
    case Family::CmRational:
    case Family::CmHarmonic: {
      const cplx g = spec.require_g();
      for (std::size_t i = 0; i < n; ++i) {
        out.L_dot(i, i) = rate.dv[i];
        out.X_dot(i, i) = rate.dz[i];
        for (std::size_t j = 0; j < n; ++j)
          if (i != j) {
            const cplx inv = 1.0 / (s.z[i] - s.z[j]);
            out.L_dot(i, j) = -kI * g * inv * inv * (rate.dz[i] - rate.dz[j]);
          }
      }
      break;
    }
    case Family::Cs: {
      const cplx g = spec.require_g();
      for (std::size_t i = 0; i < n; ++i) {
        out.L_dot(i, i) = rate.dv[i];
        out.X_dot(i, i) = 2.0 * rate.dz[i] * std::exp(2.0 * s.z[i]);
        for (std::size_t j = 0; j < n; ++j)
          if (i != j) {
            const cplx dz = s.z[i] - s.z[j];
            const cplx inv = 1.0 / std::sinh(dz);
            out.L_dot(i, j) = -kI * g * std::cosh(dz) * inv * inv * (rate.dz[i] - rate.dz[j]);
          }
      }
      break;
    }
    case Family::Rs:
    case Family::RsPerturbed: {
      const detail::RsKernel k{rs_lax_params(spec)};
      const auto sq = detail::principal_sqrt(s.v);
      for (std::size_t j = 0; j < n; ++j)
        if (std::abs(sq[j]) < kPoleTolerance) throw PoleError("RS Lax rate needs nonzero velocities");
      for (std::size_t j = 0; j < n; ++j) {
        out.L_dot(j, j) = rate.dv[j];
        out.X_dot(j, j) = 2.0 * k.p.a * rate.dz[j] * std::exp(2.0 * k.p.a * s.z[j]);
        for (std::size_t m = 0; m < n; ++m)
          if (m != j) {
            const cplx dz = s.z[j] - s.z[m];
            const cplx prod = sq[j] * sq[m];
            const cplx dprod = 0.5 * prod * (rate.dv[j] / s.v[j] + rate.dv[m] / s.v[m]);
            out.L_dot(j, m) = dprod * k.alpha(dz) + prod * k.alpha_prime(dz) * (rate.dz[j] - rate.dz[m]);
          }
      }
      break;
    }
  }
  return out;
}

/// Max-abs residuals of the two matrix evolution laws at one phase point:
///   L̇ − [L,M] − extra,  extra = 0 | −λ²X (CM_HARMONIC) | iΩL (RS_PERTURBED)
///   Ẋ − [X,M] − c[X,L]_+ − δL,  (c, δ) = (0, 1) CM | (1, 0) CS | (a, 0) RS
struct LaxResidual {
  double L = 0.0;
  double X = 0.0;
};

inline LaxResidual lax_residuals(const SystemSpec& spec, const PhaseState& s) {
  const LaxData d = build_lax(spec, s);
  const LaxRates r = lax_rates(spec, s);
  CMatrix l_res = r.L_dot - commutator(d.L, d.M);
  CMatrix x_res = r.X_dot - commutator(d.X, d.M);
  if (spec.family == Family::CmHarmonic) {
    const cplx lam = spec.require_lambda();
    l_res += (lam * lam) * d.X;
  }
  if (spec.family == Family::RsPerturbed) l_res -= (kI * spec.require_omega()) * d.L;
  if (is_cm(spec.family))
    x_res -= d.L;
  else
    x_res -= exponent_scale(spec) * anticommutator(d.X, d.L);
  return {max_abs(l_res), max_abs(x_res)};
}

/// Energy for the CM/CS families; for RS families, which have no Hamiltonian
/// here, F_1 = tr(L) = Σ ż_j.
inline cplx hamiltonian(const SystemSpec& spec, const PhaseState& s) {
  check_state(spec, s);
  const std::size_t n = spec.n;
  cplx h{};
  switch (spec.family) {
    case Family::CmRational:
    case Family::CmHarmonic: {
      const cplx g2 = spec.require_g() * spec.require_g();
      for (std::size_t i = 0; i < n; ++i) {
        h += 0.5 * s.v[i] * s.v[i];
        for (std::size_t j = i + 1; j < n; ++j) {
          const cplx d = s.z[i] - s.z[j];
          h += g2 / (d * d);
        }
      }
      if (spec.family == Family::CmHarmonic) {
        const cplx l2 = spec.require_lambda() * spec.require_lambda();
        for (std::size_t i = 0; i < n; ++i) h += 0.5 * l2 * s.z[i] * s.z[i];
      }
      break;
    }
    case Family::Cs: {
      const cplx g2 = spec.require_g() * spec.require_g();
      for (std::size_t i = 0; i < n; ++i) {
        h += 0.5 * s.v[i] * s.v[i];
        for (std::size_t j = i + 1; j < n; ++j) {
          const cplx sh = std::sinh(s.z[i] - s.z[j]);
          h += g2 / (sh * sh);
        }
      }
      break;
    }
    case Family::Rs:
    case Family::RsPerturbed:
      for (const auto& v : s.v) h += v;
      break;
  }
  return h;
}

}  // namespace laxlab

#endif  // LAXLAB_SYSTEMS_HPP
