#ifndef LAXLAB_INTEGRATE_HPP
#define LAXLAB_INTEGRATE_HPP

// Reference integrator for the equations of motion. The complex system is
// integrated as a real one (error control acts on real and imaginary parts
// separately). Steps are clipped so that every sample lands exactly on the
// sampling grid, which keeps finite-difference stencils uniform.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <future>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "laxlab/error.hpp"
#include "laxlab/linalg.hpp"
#include "laxlab/observables.hpp"
#include "laxlab/systems.hpp"

namespace laxlab {

enum class Method { Rk4Fixed, Rk45Adaptive };

struct IntegratorOptions {
  Method method = Method::Rk45Adaptive;
  double h = 1e-3;  // RK4_FIXED step
  double atol = 1e-10;
  double rtol = 1e-10;
  double t_end = 1.0;
  double sample_every = 0.1;
  long max_steps = 20'000'000;

  void validate() const {
    if (!(t_end > 0.0)) throw SpecError("t_end must be positive");
    if (!(sample_every > 0.0)) throw SpecError("sample_every must be positive");
    if (method == Method::Rk4Fixed && !(h > 0.0)) throw SpecError("h must be positive");
    if (method == Method::Rk45Adaptive && !(atol > 0.0 && rtol > 0.0))
      throw SpecError("atol and rtol must be positive");
  }
};

using StateVec = std::vector<cplx>;
using VectorField = std::function<StateVec(double, const StateVec&)>;

struct StepStats {
  long accepted = 0;
  long rejected = 0;
};

namespace detail {

inline void axpy(StateVec& out, const StateVec& y, double h, std::initializer_list<std::pair<double, const StateVec*>> terms) {
  out = y;
  for (const auto& [c, k] : terms) {
    if (c == 0.0) continue;
    const double hc = h * c;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += hc * (*k)[i];
  }
}

inline bool finite(const StateVec& y) {
  return std::all_of(y.begin(), y.end(), [](const cplx& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

}  // namespace detail

/// Classical RK4 from t to t_target in equal steps no longer than h.
inline void rk4_advance(const VectorField& f, double& t, StateVec& y, double t_target, double h, StepStats& stats) {
  const double span = t_target - t;
  if (span <= 0.0) return;
  const long m = std::max(1L, static_cast<long>(std::llround(std::ceil(span / h - 1e-9))));
  const double hh = span / static_cast<double>(m);
  StateVec tmp;
  for (long s = 0; s < m; ++s) {
    const StateVec k1 = f(t, y);
    detail::axpy(tmp, y, hh, {{0.5, &k1}});
    const StateVec k2 = f(t + 0.5 * hh, tmp);
    detail::axpy(tmp, y, hh, {{0.5, &k2}});
    const StateVec k3 = f(t + 0.5 * hh, tmp);
    detail::axpy(tmp, y, hh, {{1.0, &k3}});
    const StateVec k4 = f(t + hh, tmp);
    detail::axpy(y, y, hh, {{1.0 / 6.0, &k1}, {1.0 / 3.0, &k2}, {1.0 / 3.0, &k3}, {1.0 / 6.0, &k4}});
    t = (s + 1 == m) ? t_target : t + hh;
    ++stats.accepted;
  }
  if (!detail::finite(y)) throw IntegratorError("RK4: non-finite state");
}

/// Dormand–Prince 5(4) with FSAL and max-norm error control.
class DormandPrince {
 public:
  DormandPrince(double atol, double rtol, long max_steps = 20'000'000)
      : atol_(atol), rtol_(rtol), max_steps_(max_steps) {}

  /// Integrates y from t to t_target, landing exactly on t_target.
  void advance(const VectorField& f, double& t, StateVec& y, double t_target, StepStats& stats) {
    if (t_target <= t) return;
    if (!k1_ || k1_t_ != t) {
      k1_ = f(t, y);
      k1_t_ = t;
    }
    if (h_ <= 0.0) h_ = initial_step(f, t, y, *k1_);

    StateVec k2, k3, k4, k5, k6, k7, tmp, ynew;
    while (t < t_target) {
      if (stats.accepted + stats.rejected >= max_steps_) throw IntegratorError("step budget exhausted");
      const double remaining = t_target - t;
      bool clipped = false;
      double h = h_;
      if (h >= remaining) {
        h = remaining;
        clipped = true;
      }
      if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
        throw IntegratorError("step size underflow at t = " + std::to_string(t));

      const StateVec& k1 = *k1_;
      detail::axpy(tmp, y, h, {{1.0 / 5.0, &k1}});
      k2 = f(t + h / 5.0, tmp);
      detail::axpy(tmp, y, h, {{3.0 / 40.0, &k1}, {9.0 / 40.0, &k2}});
      k3 = f(t + 3.0 * h / 10.0, tmp);
      detail::axpy(tmp, y, h, {{44.0 / 45.0, &k1}, {-56.0 / 15.0, &k2}, {32.0 / 9.0, &k3}});
      k4 = f(t + 4.0 * h / 5.0, tmp);
      detail::axpy(tmp, y, h,
                   {{19372.0 / 6561.0, &k1}, {-25360.0 / 2187.0, &k2}, {64448.0 / 6561.0, &k3}, {-212.0 / 729.0, &k4}});
      k5 = f(t + 8.0 * h / 9.0, tmp);
      detail::axpy(tmp, y, h,
                   {{9017.0 / 3168.0, &k1},
                    {-355.0 / 33.0, &k2},
                    {46732.0 / 5247.0, &k3},
                    {49.0 / 176.0, &k4},
                    {-5103.0 / 18656.0, &k5}});
      k6 = f(t + h, tmp);
      detail::axpy(ynew, y, h,
                   {{35.0 / 384.0, &k1},
                    {500.0 / 1113.0, &k3},
                    {125.0 / 192.0, &k4},
                    {-2187.0 / 6784.0, &k5},
                    {11.0 / 84.0, &k6}});
      const double t_new = clipped ? t_target : t + h;
      k7 = f(t_new, ynew);

      // difference between 5th and embedded 4th order solutions
      static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                              e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
      double err = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) {
        const cplx e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc_re = atol_ + rtol_ * std::max(std::abs(y[i].real()), std::abs(ynew[i].real()));
        const double sc_im = atol_ + rtol_ * std::max(std::abs(y[i].imag()), std::abs(ynew[i].imag()));
        err = std::max({err, std::abs(e.real()) / sc_re, std::abs(e.imag()) / sc_im});
      }
      if (!std::isfinite(err)) err = 1e10;

      if (err <= 1.0) {
        t = t_new;
        y.swap(ynew);
        k1_ = std::move(k7);
        k1_t_ = t;
        ++stats.accepted;
        double fac = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
        fac = std::clamp(fac, 0.2, 5.0);
        if (rejected_last_) fac = std::min(fac, 1.0);
        // a clipped step says nothing about how large the natural step is
        if (!clipped || fac < 1.0) h_ = h * fac;
        rejected_last_ = false;
      } else {
        ++stats.rejected;
        h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
        rejected_last_ = true;
      }
    }
  }

 private:
  double initial_step(const VectorField& f, double t, const StateVec& y, const StateVec& f0) const {
    auto scaled_norm = [&](const StateVec& v) {
      double m = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double sc = atol_ + rtol_ * std::abs(y[i]);
        m = std::max(m, std::abs(v[i]) / sc);
      }
      return m;
    };
    const double d0 = scaled_norm(y);
    const double d1 = scaled_norm(f0);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    StateVec y1 = y;
    for (std::size_t i = 0; i < y.size(); ++i) y1[i] += h0 * f0[i];
    const StateVec f1 = f(t + h0, y1);
    StateVec diff(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) diff[i] = f1[i] - f0[i];
    const double d2 = scaled_norm(diff) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    return std::min(100.0 * h0, h1);
  }

  double atol_;
  double rtol_;
  long max_steps_;
  double h_ = 0.0;
  std::optional<StateVec> k1_;
  double k1_t_ = 0.0;
  bool rejected_last_ = false;
};

/// Integrates a generic complex ODE from t0, returning the state at each of
/// the (increasing) output times.
inline std::vector<StateVec> integrate_vector_field(const VectorField& f, double t0, StateVec y0,
                                                    std::span<const double> times, double atol, double rtol) {
  DormandPrince dp(atol, rtol);
  StepStats stats;
  double t = t0;
  std::vector<StateVec> out;
  out.reserve(times.size());
  for (double target : times) {
    if (target < t) throw IntegratorError("output times must be non-decreasing");
    dp.advance(f, t, y0, target, stats);
    out.push_back(y0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trajectories of the particle systems

/// Quantities that stay constant along exact trajectories: F_k for the
/// isospectral families, the char-poly coefficients of P for CM_HARMONIC and
/// the de-rotated F_k e^{−iΩkt} for RS_PERTURBED.
inline std::vector<cplx> conserved_quantities(const SystemSpec& spec, const ObservableFrame& fr) {
  switch (spec.family) {
    case Family::CmHarmonic:
      return fr.A_coeffs.coeffs;
    case Family::RsPerturbed: {
      std::vector<cplx> q(fr.F.size());
      for (std::size_t k = 0; k < q.size(); ++k)
        q[k] = fr.F[k] * std::exp(-kI * spec.require_omega() * static_cast<double>(k) * fr.t);
      return q;
    }
    default:
      return fr.F;
  }
}

/// max_k |q_k − q0_k| / max(1, |q0_k|).
inline double relative_drift(std::span<const cplx> q, std::span<const cplx> q0) {
  double d = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) d = std::max(d, std::abs(q[k] - q0[k]) / std::max(1.0, std::abs(q0[k])));
  return d;
}

/// Energy (CM/CS), or tr L for RS (de-rotated for RS_PERTURBED).
inline cplx conserved_energy(const SystemSpec& spec, const PhaseState& s) {
  cplx e = hamiltonian(spec, s);
  if (spec.family == Family::RsPerturbed) e *= std::exp(-kI * spec.require_omega() * s.t);
  return e;
}

struct SampleDiagnostics {
  double F_drift = std::numeric_limits<double>::quiet_NaN();  // NaN when no frame
  double energy_drift = 0.0;
  double min_separation = 0.0;
  long accepted_steps = 0;
  long rejected_steps = 0;
};

struct Sample {
  PhaseState state;
  std::optional<ObservableFrame> frame;
  SampleDiagnostics diag;
};

struct TrajectoryFault {
  enum class Kind { Collision, Pole };
  Kind kind;
  double t;
  std::string message;
  std::exception_ptr error;
};

struct Trajectory {
  std::vector<Sample> samples;
  std::optional<TrajectoryFault> fault;
  StepStats stats;

  bool complete() const { return !fault.has_value(); }
  const Sample& back() const { return samples.back(); }

  /// Time series of one observable, e.g. [](const ObservableFrame& f) { return f.G[1]; }.
  template <class Fn>
  std::vector<cplx> series(Fn&& pick) const {
    std::vector<cplx> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(pick(*s.frame));
    return out;
  }
};

namespace detail {

inline StateVec pack(const PhaseState& s) {
  StateVec y(s.z);
  y.insert(y.end(), s.v.begin(), s.v.end());
  return y;
}

inline PhaseState unpack(double t, const StateVec& y, std::size_t n) {
  PhaseState s;
  s.t = t;
  s.z.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n));
  s.v.assign(y.begin() + static_cast<std::ptrdiff_t>(n), y.end());
  return s;
}

inline std::vector<double> sample_grid(double t0, double t_end, double every) {
  std::vector<double> grid;
  const long m = static_cast<long>(std::floor(t_end / every + 1e-9));
  for (long k = 1; k <= m; ++k) grid.push_back(t0 + static_cast<double>(k) * every);
  if (grid.empty() || t0 + t_end - grid.back() > 1e-9 * std::max(1.0, t_end))
    grid.push_back(t0 + t_end);
  else
    grid.back() = std::max(grid.back(), t0 + t_end);
  return grid;
}

}  // namespace detail

inline Trajectory integrate(const SystemSpec& spec, const PhaseState& s0, const IntegratorOptions& opts) {
  spec.validate();
  opts.validate();
  check_state(spec, s0);
  const std::size_t n = spec.n;
  const bool with_frames = supports_lax(spec);

  double stage_time = s0.t;
  const VectorField rhs = [&](double t, const StateVec& y) {
    stage_time = t;
    const PhaseRate r = eom_rhs(spec, detail::unpack(t, y, n));
    StateVec out(r.dz);
    out.insert(out.end(), r.dv.begin(), r.dv.end());
    return out;
  };

  Trajectory traj;
  std::vector<cplx> q0;
  cplx e0{};

  auto record = [&](const PhaseState& s) {
    Sample smp{s, std::nullopt, {}};
    if (with_frames) smp.frame = frame(spec, s);
    const cplx e = conserved_energy(spec, s);
    if (traj.samples.empty()) {
      e0 = e;
      if (smp.frame) q0 = conserved_quantities(spec, *smp.frame);
    }
    if (smp.frame) smp.diag.F_drift = relative_drift(conserved_quantities(spec, *smp.frame), q0);
    smp.diag.energy_drift = std::abs(e - e0) / std::max(1.0, std::abs(e0));
    smp.diag.min_separation = s.min_separation();
    smp.diag.accepted_steps = traj.stats.accepted;
    smp.diag.rejected_steps = traj.stats.rejected;
    traj.samples.push_back(std::move(smp));
  };

  record(s0);
  StateVec y = detail::pack(s0);
  double t = s0.t;
  DormandPrince dp(opts.atol, opts.rtol, opts.max_steps);
  try {
    for (double target : detail::sample_grid(s0.t, opts.t_end, opts.sample_every)) {
      if (opts.method == Method::Rk4Fixed)
        rk4_advance(rhs, t, y, target, opts.h, traj.stats);
      else
        dp.advance(rhs, t, y, target, traj.stats);
      record(detail::unpack(t, y, n));
    }
  } catch (const CollisionError& e) {
    traj.fault = TrajectoryFault{TrajectoryFault::Kind::Collision, stage_time, e.what(), std::current_exception()};
  } catch (const PoleError& e) {
    traj.fault = TrajectoryFault{TrajectoryFault::Kind::Pole, stage_time, e.what(), std::current_exception()};
  }
  return traj;
}

/// Independent trajectories, evaluated concurrently; results are in input order
/// and identical to sequential calls.
inline std::vector<Trajectory> integrate_all(const SystemSpec& spec, std::span<const PhaseState> initial,
                                             const IntegratorOptions& opts) {
  std::vector<std::future<Trajectory>> jobs;
  jobs.reserve(initial.size());
  for (const auto& s0 : initial)
    jobs.push_back(std::async(std::launch::async, [&spec, &opts, s0] { return integrate(spec, s0, opts); }));
  std::vector<Trajectory> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

/// Central difference (f_{i+1} − f_{i−1}) / 2h on a uniformly sampled series.
inline cplx fd_derivative(std::span<const cplx> series, std::size_t index, double h) {
  if (index < 1 || index + 1 >= series.size())
    throw LaxError("fd_derivative: index " + std::to_string(index) + " has no central stencil");
  if (!(h > 0.0)) throw LaxError("fd_derivative: h must be positive");
  return (series[index + 1] - series[index - 1]) / (2.0 * h);
}

}  // namespace laxlab

#endif  // LAXLAB_INTEGRATE_HPP
