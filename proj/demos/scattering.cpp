// Three Calogero-Sutherland particles: integrate the equations of motion and
// compare with positions read off the spectrum of the linearized flow.

#include <cstdio>

#include "laxlab/integrate.hpp"
#include "laxlab/solver.hpp"

int main() {
  using namespace laxlab;
  const auto spec = SystemSpec::cs(3, 0.6);
  PhaseState s0;
  s0.z = {-1.1, -0.3, 0.5};
  s0.v = {0.3, -0.2, 0.25};

  IntegratorOptions opts;
  opts.t_end = 4.0;
  opts.sample_every = 1.0;
  const Trajectory tr = integrate(spec, s0, opts);
  const AlgebraicSolution sol = make_solution(spec, s0);

  std::printf("%5s  %-36s  %s\n", "t", "integrated x_j", "|integrated - spectral|");
  for (const auto& s : tr.samples) {
    const auto z = spectral_positions(sol, s.state.t);
    std::printf("%5.1f  %+10.6f %+10.6f %+10.6f    %.2e\n", s.state.t, s.state.z[0].real(), s.state.z[1].real(),
                s.state.z[2].real(), set_distance(z, s.state.z));
  }
  std::printf("final energy drift %.2e\n", tr.back().diag.energy_drift);
}
