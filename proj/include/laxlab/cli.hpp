#ifndef LAXLAB_CLI_HPP
#define LAXLAB_CLI_HPP

// The three commands behind the `laxlab` executable. Each returns the process
// exit status:
//   0 success, 1 a verify check failed, 2 config error, 3 collision,
//   4 integrator failure, 5 unsupported family.

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "laxlab/checks.hpp"
#include "laxlab/config.hpp"
#include "laxlab/error.hpp"
#include "laxlab/integrate.hpp"
#include "laxlab/io.hpp"
#include "laxlab/solver.hpp"

namespace laxlab {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitConfig = 2,
  kExitCollision = 3,
  kExitIntegrator = 4,
  kExitUnsupported = 5,
};

struct CliOptions {
  std::optional<std::string> out_dir;  // falls back to $LAXLAB_OUT_DIR, then "."
  bool quiet = false;
};

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const SpecError*>(&e)) return kExitConfig;
  if (dynamic_cast<const CollisionError*>(&e)) return kExitCollision;
  if (dynamic_cast<const UnsupportedFamilyError*>(&e)) return kExitUnsupported;
  if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return kExitConfig;
  if (dynamic_cast<const nlohmann::json::exception*>(&e)) return kExitConfig;
  return kExitIntegrator;
}

namespace detail {

inline std::filesystem::path output_dir(const CliOptions& cli) {
  if (cli.out_dir) return *cli.out_dir;
  if (const char* env = std::getenv("LAXLAB_OUT_DIR"); env && *env) return env;
  return ".";
}

/// Resolves a configured output path against the output directory and makes
/// sure it can be written before any work starts.
inline std::filesystem::path prepare_output(const CliOptions& cli, const std::string& name) {
  std::filesystem::path p(name);
  if (p.is_relative()) p = output_dir(cli) / p;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream probe(p, std::ios::app);
  if (!probe) throw SpecError("output path '" + p.string() + "' is not writable");
  return p;
}

/// Report name for a command: the configured report path with the command
/// spliced in before the extension ("x.json" -> "x.verify.json"), so the
/// three commands never overwrite each other.
inline std::string report_name(const RunConfig& c, const char* command) {
  std::filesystem::path p(c.report_json.value_or("report.json"));
  if (std::string(command) == "run") return p.string();
  const std::string ext = p.has_extension() ? p.extension().string() : ".json";
  p.replace_extension();
  p += std::string(".") + command + ext;
  return p.string();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::trunc);
  out << text;
  if (!out) throw SpecError("failed writing '" + p.string() + "'");
}

inline Json spec_json(const RunConfig& c) {
  Json j;
  j["family"] = std::string(to_string(c.spec.family));
  if (c.spec.rs_case) j["rs_case"] = std::string(to_string(*c.spec.rs_case));
  j["n"] = c.spec.n;
  return j;
}

inline Json warnings_json(const RunConfig& c) {
  Json w = Json::array();
  for (const auto& s : c.warnings) w.push_back(s);
  return w;
}

inline void print_warnings(const RunConfig& c, std::ostream& err) {
  for (const auto& w : c.warnings) err << "warning: " << w << '\n';
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline int cmd_run(const std::string& config_path, const CliOptions& cli, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = load_config(config_path);
    detail::print_warnings(cfg, err);
    const auto csv_path = detail::prepare_output(cli, cfg.trajectory_csv.value_or("trajectory.csv"));
    const auto report_path = detail::prepare_output(cli, detail::report_name(cfg, "run"));

    const Trajectory tr = integrate(cfg.spec, cfg.initial, cfg.integrator);

    std::ostringstream csv;
    write_trajectory_csv(csv, tr, cfg.spec.n);
    detail::write_file(csv_path, csv.str());

    double f_drift = tr.samples.front().frame ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    double e_drift = 0.0, min_sep = std::numeric_limits<double>::infinity();
    for (const auto& s : tr.samples) {
      if (s.frame) f_drift = std::max(f_drift, s.diag.F_drift);
      e_drift = std::max(e_drift, s.diag.energy_drift);
      min_sep = std::min(min_sep, s.diag.min_separation);
    }
    Json rep;
    rep["command"] = "run";
    rep["spec"] = detail::spec_json(cfg);
    rep["status"] = tr.complete() ? "ok" : (tr.fault->kind == TrajectoryFault::Kind::Collision ? "collision" : "pole");
    rep["samples"] = tr.samples.size();
    rep["t_final"] = tr.back().state.t;
    rep["F_drift_max"] = f_drift;
    rep["energy_drift_max"] = e_drift;
    rep["min_separation"] = min_sep;
    rep["steps"] = Json{{"accepted", tr.stats.accepted}, {"rejected", tr.stats.rejected}};
    if (tr.fault)
      rep["fault"] = Json{{"t", tr.fault->t}, {"message", tr.fault->message}};
    else
      rep["fault"] = nullptr;
    rep["final_state"] = Json{{"z", to_json(tr.back().state.z)}, {"v", to_json(tr.back().state.v)}};
    rep["warnings"] = detail::warnings_json(cfg);
    detail::write_file(report_path, json_string(rep));

    if (tr.fault) {
      err << "error: " << tr.fault->message << " (t = " << format_number(tr.fault->t) << ")\n";
      return tr.fault->kind == TrajectoryFault::Kind::Collision ? kExitCollision : kExitIntegrator;
    }
    if (!cli.quiet)
      out << "run: " << tr.samples.size() << " samples to t = " << format_number(tr.back().state.t)
          << ", F drift " << format_number(f_drift) << ", energy drift " << format_number(e_drift) << "\n"
          << "wrote " << csv_path.string() << "\nwrote " << report_path.string() << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

inline int cmd_verify(const std::string& config_path, const CliOptions& cli, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = load_config(config_path);
    detail::print_warnings(cfg, err);
    if (cfg.verify.empty()) throw SpecError("config.verify names no checks");
    std::vector<const CheckDef*> defs;
    for (const auto& name : cfg.verify) {
      const CheckDef& d = find_check(name);
      if (!d.applies(cfg.spec))
        throw SpecError("check '" + name + "' does not apply to " + std::string(to_string(cfg.spec.family)));
      defs.push_back(&d);
    }
    const auto report_path = detail::prepare_output(cli, detail::report_name(cfg, "verify"));

    const CheckContext ctx{cfg.spec, cfg.initial, cfg.integrator, cfg.seed};
    std::vector<std::future<CheckResult>> jobs;
    for (const CheckDef* d : defs) jobs.push_back(std::async(std::launch::async, d->run, std::cref(ctx)));

    Json checks = Json::array();
    int code = kExitOk;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      Json c;
      c["name"] = std::string(defs[i]->name);
      try {
        const CheckResult r = jobs[i].get();
        c["measured"] = r.measured;
        c["threshold"] = r.threshold;
        c["passed"] = r.passed;
        Json extra = Json::object();
        for (const auto& [k, v] : r.extra) extra[k] = v;
        c["details"] = extra;
        if (!r.note.empty()) c["note"] = r.note;
        if (!r.passed && code == kExitOk) code = kExitCheckFailed;
        if (!cli.quiet)
          out << (r.passed ? "PASS " : "FAIL ") << r.name << "  measured " << format_number(r.measured)
              << "  threshold " << format_number(r.threshold) << '\n';
      } catch (const std::exception& e) {
        c["passed"] = false;
        c["error"] = e.what();
        const int ec = exit_code_for(e);
        if (code == kExitOk || code == kExitCheckFailed) code = ec;
        err << "error: check " << defs[i]->name << ": " << e.what() << '\n';
      }
      checks.push_back(c);
    }
    Json rep;
    rep["command"] = "verify";
    rep["spec"] = detail::spec_json(cfg);
    rep["seed"] = cfg.seed;
    rep["all_passed"] = code == kExitOk;
    rep["checks"] = checks;
    rep["warnings"] = detail::warnings_json(cfg);
    detail::write_file(report_path, json_string(rep));
    if (!cli.quiet) out << "wrote " << report_path.string() << '\n';
    return code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

inline int cmd_solve(const std::string& config_path, const std::vector<double>& times, bool verify_against_oracle,
                     const CliOptions& cli, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = load_config(config_path);
    detail::print_warnings(cfg, err);
    if (times.empty()) throw SpecError("solve needs at least one time");
    for (double t : times)
      if (!(t >= 0.0) || !std::isfinite(t)) throw SpecError("solve times must be finite and non-negative");
    const auto report_path = detail::prepare_output(cli, detail::report_name(cfg, "solve"));

    const AlgebraicSolution sol = make_solution(cfg.spec, cfg.initial);
    const bool perturbed = cfg.spec.family == Family::RsPerturbed;
    Json results = Json::array();
    for (double t : times) {
      const auto z = spectral_positions(sol, t);
      const auto g = perturbed ? evolve_G_perturbed(sol, t) : evolve_G(sol, t);
      Json r;
      r["t"] = t;
      r["positions"] = to_json(z);
      r["G"] = to_json(g);
      if (verify_against_oracle) {
        double pos = 0.0, gres = 0.0;
        if (t > 0.0) {
          IntegratorOptions o = cfg.integrator;
          o.method = Method::Rk45Adaptive;
          o.atol = o.rtol = 1e-12;
          o.t_end = t;
          o.sample_every = t;
          const Trajectory tr = integrate(cfg.spec, cfg.initial, o);
          if (!tr.complete()) std::rethrow_exception(tr.fault->error);
          pos = set_distance(z, tr.back().state.z);
          for (std::size_t k = 0; k < g.size(); ++k)
            gres = std::max(gres, std::abs(g[k] - tr.back().frame->G[k]) / std::max(1.0, std::abs(tr.back().frame->G[k])));
        }
        r["oracle"] = Json{{"position_residual", pos}, {"G_residual", gres}};
      }
      results.push_back(r);
      if (!cli.quiet) {
        out << "t = " << format_number(t) << ':';
        for (const auto& p : z) out << ' ' << format_number(p.real()) << (p.imag() < 0 ? "-" : "+") << format_number(std::abs(p.imag())) << 'i';
        out << '\n';
      }
    }
    Json rep;
    rep["command"] = "solve";
    rep["spec"] = detail::spec_json(cfg);
    rep["results"] = results;
    rep["warnings"] = detail::warnings_json(cfg);
    detail::write_file(report_path, json_string(rep));
    if (!cli.quiet) out << "wrote " << report_path.string() << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace laxlab

#endif  // LAXLAB_CLI_HPP
