#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "hicomp/cns.hpp"
#include "hicomp/config.hpp"
#include "hicomp/error.hpp"
#include "hicomp/io.hpp"
#include "hicomp/pme.hpp"
#include "hicomp/study.hpp"

namespace hicomp::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config_path;
  std::string output_dir;
  int jobs = 0;
  bool verbose = false;
};

/// Loads the config (defaults when no path is given) and applies --output.
StudyConfig resolve_config(const Options& o) {
  StudyConfig c = o.config_path.empty() ? StudyConfig{} : load_config(o.config_path);
  if (!o.output_dir.empty()) c.output_dir = o.output_dir;
  c.validate();
  return c;
}

std::string tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

StudyOptions study_options(const Options& o, std::ostream& err) {
  StudyOptions s;
  s.jobs = resolve_jobs(o.jobs);
  if (o.verbose) {
    auto mutex = std::make_shared<std::mutex>();
    s.log = [&err, mutex](const std::string& msg) {
      std::lock_guard lock(*mutex);
      err << msg << '\n';
    };
  } else {
    s.log = [&err](const std::string& msg) {
      if (msg.rfind("warning", 0) == 0) err << msg << '\n';
    };
  }
  return s;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  const StudyConfig c = resolve_config(o);
  const std::string hash = config_hash(c);
  const Field rho0 = make_initial_field(c);
  const unsigned jobs = resolve_jobs(o.jobs);
  std::vector<std::optional<CnsRun>> runs(c.eps_values.size());
  std::vector<std::vector<DiagnosticsRecord>> diags(c.eps_values.size());
  parallel_for(c.eps_values.size(), jobs, [&](std::size_t e) {
    const PhysParams p = c.params(c.eps_values[e]);
    CnsState init = well_prepared_init(rho0, p, c.thresholds.floor);
    init.t = c.t_start();
    diags[e].push_back(diagnostics(init, p));
    runs[e] = cns_solve_to(init, p, c.t_end, c.snapshot_times);
    for (const CnsState& s : runs[e]->snapshots) diags[e].push_back(diagnostics(s, p));
  });
  const fs::path dir = fs::path(c.output_dir) / "simulate";
  for (std::size_t e = 0; e < runs.size(); ++e) {
    const PhysParams p = c.params(c.eps_values[e]);
    const std::string stem = "eps_" + tag(c.eps_values[e]);
    for (const CnsState& s : runs[e]->snapshots)
      write_text_file(dir / (stem + "_t_" + tag(s.t) + ".csv"),
                      cns_snapshot_csv(s, p, {"cns snapshot", hash, s.t, p}));
    write_text_file(dir / (stem + "_diagnostics.csv"),
                    diagnostics_csv(diags[e], {"diagnostics", hash, c.t_end, p}));
    out << "eps=" << tag(c.eps_values[e]) << " steps=" << runs[e]->steps
        << " floored_mass=" << runs[e]->floored_mass
        << " sup_sqrt_rho_v=" << diags[e].back().sqrt_rho_v_l2 << '\n';
  }
  if (o.verbose) err << "wrote " << dir.string() << '\n';
  return kExitOk;
}

int cmd_pme(const Options& o, std::ostream& out, std::ostream&) {
  const StudyConfig c = resolve_config(o);
  const std::string hash = config_hash(c);
  const PhysParams p = c.params(0.0);
  std::vector<double> times;
  for (double s : c.snapshot_times)
    if (s > c.t_start()) times.push_back(s);
  if (times.empty() || times.back() != c.t_end) times.push_back(c.t_end);
  const auto states = pme_solve_path(PmeState{c.t_start(), make_initial_field(c)}, p, times);
  const fs::path dir = fs::path(c.output_dir) / "pme";
  for (const PmeState& s : states) {
    write_text_file(dir / ("pme_t_" + tag(s.t) + ".csv"),
                    pme_snapshot_csv(s, p, {"pme snapshot", hash, s.t, p}));
    const Interface omega = interface_positions(s, c.thresholds.support);
    out << "t=" << tag(s.t) << " support=[" << omega.left << ", " << omega.right
        << "] max_rho=" << max_value(s.rho) << '\n';
  }
  return kExitOk;
}

int cmd_rate_study(const Options& o, std::ostream& out, std::ostream& err) {
  const StudyConfig c = resolve_config(o);
  const RateStudyResult r = run_rate_study(c, study_options(o, err));
  const std::string hash = config_hash(c);
  const fs::path dir = fs::path(c.output_dir) / "rate-study";
  const PhysParams p = c.params(0.0);
  write_text_file(dir / "rate_study.json", rate_study_json(r, c));
  for (auto [name, table] : {std::pair{"errors_h1.csv", RateTable::H1},
                             std::pair{"errors_l2.csv", RateTable::L2},
                             std::pair{"mass_outside.csv", RateTable::MassOutside},
                             std::pair{"mass_outside_raw.csv", RateTable::MassOutsideRaw}})
    write_text_file(dir / name, rate_table_csv(r, table, {"rate table", hash, c.t_end, p}));
  out << std::setprecision(4) << "slope_h1=" << r.slope_h1.slope << " (r2 "
      << r.slope_h1.r_squared << ")\n"
      << "slope_l2=" << r.slope_l2.slope << " (r2 " << r.slope_l2.r_squared << ")"
      << (r.l2_hypothesis_holds ? "" : " [alpha > 3/2: outside the L2 theorem]") << '\n'
      << "slope_mass=" << r.slope_mass.slope << " (r2 " << r.slope_mass.r_squared << ")\n"
      << "grid_convergence_ratio=" << r.grid_convergence_ratio
      << (r.grid_checked ? (r.grid_converged ? " (converged)" : " (NOT converged)")
                         : " (not checked)")
      << '\n';
  return kExitOk;
}

int cmd_support_study(const Options& o, std::ostream& out, std::ostream&) {
  const StudyConfig c = resolve_config(o);
  const SupportGrowthResult r = support_growth_study(c);
  write_text_file(fs::path(c.output_dir) / "support-study" / "support_study.json",
                  support_study_json(r, c));
  out << std::setprecision(4) << "support_exponent=" << r.exponent.slope << " (expected "
      << 1.0 / (c.alpha + 1.0) << ", r2 " << r.exponent.r_squared << ")\n"
      << "max_density_exponent=" << r.decay.slope << " (expected " << -1.0 / (c.alpha + 1.0)
      << ")\n";
  return kExitOk;
}

int cmd_certify(const Options& o, std::ostream& out, std::ostream& err) {
  const StudyConfig c = resolve_config(o);
  StudyOptions so = study_options(o, err);
  so.grid_check = false;
  const RateStudyResult r = run_rate_study(c, so);
  const std::string hash = config_hash(c);
  const Grid grid = c.grid.make();
  const fs::path dir = fs::path(c.output_dir) / "certify";
  out << std::setprecision(4);
  for (const EpsRun& run : r.runs) {
    const PhysParams p = c.params(run.epsilon);
    for (std::size_t k = 0; k < run.certificates.size(); ++k) {
      const DualCertificate& cert = run.certificates[k];
      write_text_file(dir / ("certificate_eps_" + tag(run.epsilon) + "_theta_" +
                             std::to_string(k) + ".json"),
                      certificate_json(cert, grid, p, hash));
      out << "eps=" << tag(run.epsilon) << " theta=" << k << " lhs=" << cert.lhs
          << " bound=" << cert.bound << " C=" << cert.measured_c
          << " identity_residual=" << cert.identity_residual << '\n';
    }
  }
  return kExitOk;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream&) {
  const StudyConfig c = resolve_config(o);
  const std::vector<CheckRow> rows = run_validation_suite(c.seed);
  bool all = true;
  out << std::left << std::setw(30) << "check" << std::setw(14) << "measured" << std::setw(12)
      << "tolerance" << "result\n";
  for (const CheckRow& r : rows) {
    out << std::left << std::setw(30) << r.name << std::setw(14) << std::setprecision(4)
        << r.measured << std::setw(12) << r.tolerance << (r.pass ? "pass" : "FAIL") << '\n';
    all = all && r.pass;
  }
  return all ? kExitOk : kExitValidation;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"hicomp: compressible Navier-Stokes and porous medium convergence laboratory",
               "hicomp"};
  Options o;
  app.add_option("--config", o.config_path, "JSON study configuration");
  app.add_option("--output", o.output_dir, "Output directory (overrides output_dir)");
  app.add_option("--jobs", o.jobs, "Worker threads (default: HICOMP_JOBS or all cores)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--verbose", o.verbose, "Progress messages on stderr");
  app.require_subcommand(1);

  using Handler = int (*)(const Options&, std::ostream&, std::ostream&);
  const std::pair<const char*, std::pair<const char*, Handler>> commands[] = {
      {"simulate", {"Navier-Stokes runs for every epsilon, snapshots and diagnostics", cmd_simulate}},
      {"pme", {"Porous medium run with snapshots", cmd_pme}},
      {"rate-study", {"Epsilon sweep with error tables, fitted slopes and grid check", cmd_rate_study}},
      {"support-study", {"Support growth and maximum decay exponents", cmd_support_study}},
      {"certify", {"Dual certificates for every epsilon and test function", cmd_certify}},
      {"validate", {"Built-in invariant suite with a pass/fail table", cmd_validate}},
  };
  Handler selected = nullptr;
  for (const auto& [name, info] : commands) {
    CLI::App* sub = app.add_subcommand(name, info.first);
    sub->fallthrough();
    sub->callback([&selected, h = info.second] { selected = h; });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }
  try {
    return selected(o, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace hicomp::cli
