#ifndef LAXLAB_TESTS_FIXTURES_HPP
#define LAXLAB_TESTS_FIXTURES_HPP

// Documented initial conditions shared by the unit and acceptance suites.

#include <cstddef>
#include <string>
#include <vector>

#include "laxlab/systems.hpp"

namespace laxlab::fixtures {

struct Case {
  std::string name;
  SystemSpec spec;
  PhaseState state;
};

inline PhaseState cm_state(std::size_t n) {
  static const double x[] = {-1.3, -0.2, 0.9, 2.1, 3.0, 4.2};
  static const double y[] = {0.4, -0.3, 0.2, -0.5, 0.1, 0.3};
  PhaseState s;
  for (std::size_t i = 0; i < n; ++i) {
    s.z.emplace_back(x[i]);
    s.v.emplace_back(y[i]);
  }
  return s;
}

inline PhaseState cs_state(std::size_t n) {
  static const double x[] = {-1.1, -0.3, 0.5, 1.4, 2.2, 3.1};
  static const double y[] = {0.3, -0.2, 0.25, -0.35, 0.1, 0.15};
  PhaseState s;
  for (std::size_t i = 0; i < n; ++i) {
    s.z.emplace_back(x[i]);
    s.v.emplace_back(y[i]);
  }
  return s;
}

/// Moving-right RS configuration with a small imaginary tilt.
inline PhaseState rs_state(std::size_t n) {
  static const double x[] = {-0.9, 0.1, 1.0, 2.2, 3.1, 4.0};
  static const double v[] = {0.8, 0.5, 0.3, 0.6, 0.4, 0.7};
  PhaseState s;
  for (std::size_t i = 0; i < n; ++i) {
    s.z.emplace_back(x[i], 0.02 * static_cast<double>(i));
    s.v.emplace_back(v[i], 0.05);
  }
  return s;
}

/// Slow RS configuration for the periodic family; the loop in the complex
/// plane stays small so no branch or collision issues arise over a period.
inline PhaseState rs_periodic_state(std::size_t n) {
  static const double x[] = {-0.8, 0.4, 1.5, 2.6, 3.5, 4.4};
  static const double v[] = {0.3, 0.2, 0.25, 0.15, 0.2, 0.3};
  PhaseState s;
  for (std::size_t i = 0; i < n; ++i) {
    s.z.emplace_back(x[i]);
    s.v.emplace_back(v[i], 0.03);
  }
  return s;
}

inline std::vector<Case> lax_cases(std::size_t n) {
  return {
      {"CM_RATIONAL", SystemSpec::cm_rational(n, 0.7), cm_state(n)},
      {"CM_HARMONIC", SystemSpec::cm_harmonic(n, 0.7, 0.9), cm_state(n)},
      {"CS", SystemSpec::cs(n, 0.6), cs_state(n)},
      {"RS(v)", SystemSpec::rs(n, RsCase::V, 0.8, 0.6), rs_state(n)},
      {"RS(iii)", SystemSpec::rs(n, RsCase::III, 0.8), rs_state(n)},
      {"RS(iv)", SystemSpec::rs(n, RsCase::IV, 0.9), rs_state(n)},
      {"RS_PERTURBED(v)", SystemSpec::rs_perturbed(n, RsCase::V, 1.0, 0.8, 0.6), rs_periodic_state(n)},
      {"RS_PERTURBED(iii)", SystemSpec::rs_perturbed(n, RsCase::III, 1.3, 0.7), rs_periodic_state(n)},
  };
}

}  // namespace laxlab::fixtures

#endif  // LAXLAB_TESTS_FIXTURES_HPP
