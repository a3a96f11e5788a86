#ifndef LAXLAB_CONFIG_HPP
#define LAXLAB_CONFIG_HPP

// Run configuration: strict JSON, unknown keys rejected, complex numbers as
// [re, im] (a bare number is read as real).
//
//   {
//     "spec":       {"family": "RS", "n": 2, "rs_case": "v", "a": 1.0, "r": 0.5,
//                    "g": .., "lambda": .., "mu": .., "Omega": .., "collision_epsilon": ..},
//     "initial":    {"t": 0, "z": [[re, im], ...], "v": [[re, im], ...]},
//     "integrator": {"method": "RK45_ADAPTIVE", "h": .., "atol": .., "rtol": ..,
//                    "t_end": .., "sample_every": .., "max_steps": ..},
//     "outputs":    {"trajectory_csv": "traj.csv", "report_json": "report.json"},
//     "verify":     ["conservation", ...],
//     "seed":       7
//   }

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "laxlab/error.hpp"
#include "laxlab/integrate.hpp"
#include "laxlab/systems.hpp"

namespace laxlab {

struct RunConfig {
  SystemSpec spec;
  PhaseState initial;
  IntegratorOptions integrator;
  std::optional<std::string> trajectory_csv;
  std::optional<std::string> report_json;
  std::vector<std::string> verify;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

namespace detail {

using JsonIn = nlohmann::json;

inline void only_keys(const JsonIn& obj, const char* where, std::set<std::string> allowed) {
  if (!obj.is_object()) throw SpecError(std::string(where) + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) throw SpecError("unknown field '" + it.key() + "' in " + where);
}

inline double real_value(const JsonIn& j, const std::string& what) {
  if (!j.is_number()) throw SpecError(what + " must be a number");
  return j.get<double>();
}

inline cplx complex_value(const JsonIn& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw SpecError(what + " must be [re, im] or a number");
}

inline std::vector<cplx> complex_list(const JsonIn& j, const std::string& what) {
  if (!j.is_array()) throw SpecError(what + " must be a list of [re, im] pairs");
  std::vector<cplx> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(complex_value(j[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

inline SystemSpec parse_spec(const JsonIn& j, std::vector<std::string>& warnings) {
  only_keys(j, "spec", {"family", "n", "g", "lambda", "a", "r", "mu", "Omega", "rs_case", "collision_epsilon"});
  if (!j.contains("family") || !j["family"].is_string()) throw SpecError("spec.family is required");
  if (!j.contains("n") || !j["n"].is_number_integer()) throw SpecError("spec.n must be an integer");
  if (j["n"].get<long long>() < 1) throw SpecError("n must be at least 1");

  SystemSpec s;
  s.family = parse_family(j["family"].get<std::string>());
  s.n = static_cast<std::size_t>(j["n"].get<long long>());
  if (j.contains("collision_epsilon")) s.collision_epsilon = real_value(j["collision_epsilon"], "collision_epsilon");

  const bool rs = is_rs(s.family);
  if (rs) {
    if (!j.contains("rs_case") || !j["rs_case"].is_string()) throw SpecError("spec.rs_case is required for RS families");
    s.rs_case = parse_rs_case(j["rs_case"].get<std::string>());
  }
  auto used = [&](const std::string& key) {
    const RsCase c = s.rs_case.value_or(RsCase::I);
    if (key == "g") return !rs;
    if (key == "lambda") return s.family == Family::CmHarmonic;
    if (key == "Omega") return s.family == Family::RsPerturbed;
    if (key == "rs_case") return rs;
    if (key == "a") return rs && (c == RsCase::III || c == RsCase::IV || c == RsCase::V);
    if (key == "r") return rs && (c == RsCase::II || c == RsCase::V);
    if (key == "mu") return rs && c == RsCase::V;
    return true;
  };
  for (const char* key : {"g", "lambda", "a", "r", "mu", "Omega", "rs_case"}) {
    if (!j.contains(key)) continue;
    if (!used(key)) {
      warnings.push_back(std::string("parameter '") + key + "' is not used by " + std::string(to_string(s.family)) +
                         (s.rs_case ? " case " + std::string(to_string(*s.rs_case)) : "") + " and was ignored");
      continue;
    }
    const std::string k = key;
    if (k == "g") s.g = complex_value(j[k], "g");
    if (k == "lambda") s.lambda = complex_value(j[k], "lambda");
    if (k == "a") s.a = complex_value(j[k], "a");
    if (k == "r") s.r = complex_value(j[k], "r");
    if (k == "Omega") s.omega = real_value(j[k], "Omega");
  }
  if (j.contains("mu") && used("mu"))
    s.mu = complex_value(j["mu"], "mu");
  else
    s.resolve_mu();
  s.validate();
  return s;
}

inline IntegratorOptions parse_integrator(const JsonIn& j) {
  only_keys(j, "integrator", {"method", "h", "atol", "rtol", "t_end", "sample_every", "max_steps"});
  IntegratorOptions o;
  if (j.contains("method")) {
    if (!j["method"].is_string()) throw SpecError("integrator.method must be a string");
    const auto m = j["method"].get<std::string>();
    if (m == "RK4_FIXED")
      o.method = Method::Rk4Fixed;
    else if (m == "RK45_ADAPTIVE")
      o.method = Method::Rk45Adaptive;
    else
      throw SpecError("unknown integrator method '" + m + "'");
  }
  if (j.contains("h")) o.h = real_value(j["h"], "h");
  if (j.contains("atol")) o.atol = real_value(j["atol"], "atol");
  if (j.contains("rtol")) o.rtol = real_value(j["rtol"], "rtol");
  if (j.contains("t_end")) o.t_end = real_value(j["t_end"], "t_end");
  if (j.contains("sample_every")) o.sample_every = real_value(j["sample_every"], "sample_every");
  if (j.contains("max_steps")) {
    if (!j["max_steps"].is_number_integer() || j["max_steps"].get<long long>() < 1)
      throw SpecError("max_steps must be a positive integer");
    o.max_steps = j["max_steps"].get<long>();
  }
  o.validate();
  return o;
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  detail::JsonIn j;
  try {
    j = detail::JsonIn::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SpecError(std::string("config is not valid JSON: ") + e.what());
  }
  detail::only_keys(j, "config", {"spec", "initial", "integrator", "outputs", "verify", "seed"});
  if (!j.contains("spec")) throw SpecError("config.spec is required");
  if (!j.contains("initial")) throw SpecError("config.initial is required");

  RunConfig c;
  c.spec = detail::parse_spec(j["spec"], c.warnings);

  const auto& ini = j["initial"];
  detail::only_keys(ini, "initial", {"t", "z", "v"});
  if (!ini.contains("z") || !ini.contains("v")) throw SpecError("initial.z and initial.v are required");
  c.initial.z = detail::complex_list(ini["z"], "initial.z");
  c.initial.v = detail::complex_list(ini["v"], "initial.v");
  if (ini.contains("t")) c.initial.t = detail::real_value(ini["t"], "initial.t");
  try {
    check_state(c.spec, c.initial);
  } catch (const CollisionError& e) {
    throw SpecError(std::string("initial state: ") + e.what());
  }

  if (j.contains("integrator")) c.integrator = detail::parse_integrator(j["integrator"]);

  if (j.contains("outputs")) {
    const auto& o = j["outputs"];
    detail::only_keys(o, "outputs", {"trajectory_csv", "report_json"});
    for (const char* key : {"trajectory_csv", "report_json"}) {
      if (!o.contains(key)) continue;
      if (!o[key].is_string() || o[key].get<std::string>().empty())
        throw SpecError(std::string("outputs.") + key + " must be a non-empty path");
      (std::string(key) == "trajectory_csv" ? c.trajectory_csv : c.report_json) = o[key].get<std::string>();
    }
  }
  if (j.contains("verify")) {
    if (!j["verify"].is_array()) throw SpecError("verify must be a list of check names");
    for (const auto& v : j["verify"]) {
      if (!v.is_string()) throw SpecError("verify entries must be strings");
      c.verify.push_back(v.get<std::string>());
    }
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw SpecError("seed must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace laxlab

#endif  // LAXLAB_CONFIG_HPP
