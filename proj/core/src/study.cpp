#include "hicomp/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

#include "hicomp/cns.hpp"
#include "hicomp/error.hpp"
#include "hicomp/pme.hpp"

namespace hicomp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kGridGate = 0.1;
constexpr double kL2AlphaLimit = 1.5;
constexpr double kEnerateSlack = 1.05;

SlopeFit nan_fit() { return {kNaN, kNaN, kNaN}; }

SlopeFit fit_if_positive(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() < 3) return nan_fit();
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) return nan_fit();
  return fit_loglog_slope(xs, ys);
}

void say(const StudyOptions& o, const std::string& msg) {
  if (o.log) o.log(msg);
}

/// Everything measured on one grid.
struct GridResult {
  std::vector<std::vector<double>> h1, l2, leak, leak_raw;  // [snapshot][eps]
  std::vector<Interface> supports;
  std::vector<EpsRun> runs;
  double b1 = 0.0;
};

GridResult run_on_grid(const StudyConfig& config, const Grid& grid,
                       const std::vector<double>& eps, const std::vector<double>& snapshots,
                       bool with_certificates, const StudyOptions& options) {
  const double t0 = config.t_start();
  const PhysParams base = config.params(0.0);
  const Field rho0 = make_initial_field(config, grid);
  const CnsState start = well_prepared_init(rho0, base, config.thresholds.floor);

  // Sample times: uniform certificate path plus the snapshots.
  std::vector<double> samples(snapshots);
  if (with_certificates) {
    const int n = config.certificate.path_samples;
    for (int k = 1; k <= n; ++k)
      samples.push_back(t0 + (config.t_end - t0) * static_cast<double>(k) / n);
  }
  std::sort(samples.begin(), samples.end());
  samples.erase(std::unique(samples.begin(), samples.end()), samples.end());
  std::vector<std::size_t> snapshot_index;
  for (double s : snapshots)
    snapshot_index.push_back(static_cast<std::size_t>(
        std::lower_bound(samples.begin(), samples.end(), s) - samples.begin()));

  say(options, "reference PME run on n=" + std::to_string(grid.n_cells()));
  const std::vector<Field> reference = matched_reference_path(start.rho, t0, base, samples);

  GridResult out;
  const std::size_t ns = snapshots.size();
  const std::size_t ne = eps.size();
  for (auto* m : {&out.h1, &out.l2, &out.leak, &out.leak_raw})
    m->assign(ns, std::vector<double>(ne, 0.0));
  for (std::size_t j = 0; j < ns; ++j)
    out.supports.push_back(interface_positions(reference[snapshot_index[j]],
                                               config.thresholds.support));
  out.b1 = interface_positions(start.rho, config.thresholds.support).right;
  out.runs.resize(ne);

  std::vector<Field> thetas;
  if (with_certificates)
    for (const auto& b : config.certificate.thetas)
      thetas.push_back(unit_gradient_bump(grid, b.center, b.radius));

  FieldPath reference_path;
  if (with_certificates) {
    reference_path.push_back(t0, start.rho);
    for (std::size_t k = 0; k < samples.size(); ++k)
      if (samples[k] > t0) reference_path.push_back(samples[k], reference[k]);
  }

  parallel_for(ne, options.jobs, [&](std::size_t e) {
    const PhysParams params = config.params(eps[e]);
    const CnsState init = well_prepared_init(rho0, params, config.thresholds.floor);
    const CnsRun run = cns_solve_to(init, params, config.t_end, samples);
    EpsRun& rec = out.runs[e];
    rec.epsilon = eps[e];
    rec.floored_mass = run.floored_mass;
    rec.steps = run.steps;
    const double m0 = integrate(init.rho);
    rec.mass_drift = std::abs(integrate(run.state.rho) - m0) / m0;
    rec.velocity_bound = kEnerateSlack * effective_velocity_bound(init.rho, params);
    for (const CnsState& s : run.snapshots)
      rec.sup_sqrt_rho_v = std::max(rec.sup_sqrt_rho_v, diagnostics(s, params).sqrt_rho_v_l2);

    for (std::size_t j = 0; j < ns; ++j) {
      const CnsState& s = run.snapshots[snapshot_index[j]];
      const Field& ref = reference[snapshot_index[j]];
      const ErrorPair ep = error_pair(s.rho, ref);
      out.h1[j][e] = ep.h1;
      out.l2[j][e] = ep.l2;
      out.leak[j][e] = excess_mass_outside(s.rho, ref, out.supports[j]);
      out.leak_raw[j][e] = mass_outside_support(s.rho, out.supports[j], s.rho_floor);
      rec.diagnostics.push_back(diagnostics(s, params));
    }

    if (with_certificates) {
      FieldPath rho_path, momentum_path;
      rho_path.push_back(t0, init.rho);
      momentum_path.push_back(t0, init.momentum_v);
      for (std::size_t k = 0; k < samples.size(); ++k) {
        if (!(samples[k] > t0)) continue;
        rho_path.push_back(samples[k], run.snapshots[k].rho);
        momentum_path.push_back(samples[k], run.snapshots[k].momentum_v);
      }
      for (const Field& theta : thetas)
        rec.certificates.push_back(dual_certificate(rho_path, reference_path, momentum_path,
                                                    theta, config.certificate.eta,
                                                    config.certificate.cap, params));
    }
    say(options, "eps=" + std::to_string(eps[e]) + " done (" + std::to_string(run.steps) +
                     " steps)");
  });
  return out;
}

double max_relative_change(const std::vector<double>& fine, const std::vector<double>& coarse) {
  double worst = 0.0;
  for (std::size_t i = 0; i < fine.size(); ++i) {
    const double denom = std::abs(fine[i]);
    worst = std::max(worst, denom > 0.0 ? std::abs(fine[i] - coarse[i]) / denom
                                        : std::abs(coarse[i]) > 0.0 ? 1.0 : 0.0);
  }
  return worst;
}

}  // namespace

SlopeFit fit_loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ValidationError("fit_loglog_slope: xs and ys differ in length");
  if (xs.size() < 3) throw ValidationError("fit_loglog_slope: need at least 3 points");
  const std::size_t n = xs.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0) || !std::isfinite(xs[i]) || !std::isfinite(ys[i]))
      throw ValidationError("fit_loglog_slope: inputs must be positive and finite");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 1e-24)) throw ValidationError("fit_loglog_slope: xs are all equal");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  // A perfectly flat series is fitted exactly.
  fit.r_squared = syy > 1e-30 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

void parallel_for(std::size_t count, unsigned jobs,
                  const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(count);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            task(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

unsigned resolve_jobs(int requested) {
  if (requested > 0) return static_cast<unsigned>(requested);
  if (const char* env = std::getenv("HICOMP_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    throw ValidationError(std::string("HICOMP_JOBS must be a positive integer, got \"") + env +
                          "\"");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<Field> matched_reference_path(const Field& rho0, double t0, const PhysParams& params,
                                          std::span<const double> times) {
  const PhysParams pressureless = params.with_epsilon(0.0);
  const Field zero = Field::zeros(rho0.grid());
  const PmeStepRule rule = [&](const PmeState& s) {
    return cfl_dt(CnsState{s.t, s.rho, zero, 0.0}, pressureless);
  };
  std::vector<Field> out;
  out.reserve(times.size());
  for (PmeState& s : pme_solve_path(PmeState{t0, rho0}, pressureless, times, rule))
    out.push_back(std::move(s.rho));
  return out;
}

RateStudyResult run_rate_study(const StudyConfig& config, const StudyOptions& options) {
  config.validate();
  const PhysParams base = config.params(0.0);
  if (config.pme_coeff && std::abs(*config.pme_coeff * config.alpha - 1.0) > 1e-12)
    throw ValidationError(
        "rate study requires pme_coeff = 1/alpha, the diffusion of the Navier-Stokes limit");
  std::vector<double> eps = config.eps_values;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  if (eps.size() < 3) throw ValidationError("rate study needs at least 3 epsilon values");
  if (!(eps.back() > 0.0)) throw ValidationError("rate study needs positive epsilon values");

  std::vector<double> snapshots;
  for (double s : config.snapshot_times)
    if (s > config.t_start()) snapshots.push_back(s);
  if (snapshots.empty() || snapshots.back() != config.t_end) snapshots.push_back(config.t_end);

  const Grid grid = config.grid.make();
  GridResult fine = run_on_grid(config, grid, eps, snapshots, options.certificates, options);

  RateStudyResult r;
  r.alpha = base.alpha;
  r.gamma = base.gamma;
  r.t_snapshots = snapshots;
  r.eps_values = eps;
  r.errors_h1 = fine.h1;
  r.errors_l2 = fine.l2;
  r.mass_outside = fine.leak;
  r.mass_outside_raw = fine.leak_raw;
  r.supports = fine.supports;
  r.runs = std::move(fine.runs);
  r.l2_hypothesis_holds = base.alpha <= kL2AlphaLimit;

  const std::size_t last = snapshots.size() - 1;
  r.slope_h1 = fit_loglog_slope(eps, r.errors_h1[last]);
  r.slope_l2 = fit_loglog_slope(eps, r.errors_l2[last]);
  r.slope_mass = fit_if_positive(eps, r.mass_outside[last]);
  r.slope_mass_raw = fit_if_positive(eps, r.mass_outside_raw[last]);
  for (std::size_t j = 0; j < snapshots.size(); ++j) {
    r.snapshot_slopes_h1.push_back(fit_if_positive(eps, r.errors_h1[j]));
    r.snapshot_slopes_l2.push_back(fit_if_positive(eps, r.errors_l2[j]));
    r.snapshot_slopes_mass.push_back(fit_if_positive(eps, r.mass_outside[j]));
  }
  {
    std::vector<double> ts, growth;
    for (std::size_t j = 0; j < snapshots.size(); ++j) {
      const double g = r.supports[j].right - fine.b1;
      if (g > 0.0) {
        ts.push_back(snapshots[j] - config.t_start());
        growth.push_back(g);
      }
    }
    r.slope_support_growth = fit_if_positive(ts, growth);
  }

  const bool grid_check = config.grid_check && options.grid_check;
  if (grid_check) {
    const Grid coarse = make_grid(config.grid.x_min, config.grid.x_max, config.grid.n_cells / 2);
    const GridResult c = run_on_grid(config, coarse, eps, snapshots, false, options);
    r.grid_convergence_ratio = std::max(max_relative_change(fine.h1[last], c.h1[last]),
                                        max_relative_change(fine.l2[last], c.l2[last]));
    r.grid_change_mass = max_relative_change(fine.leak[last], c.leak[last]);
    r.grid_checked = true;
    r.grid_converged = r.grid_convergence_ratio <= kGridGate;
    if (!r.grid_converged) {
      std::ostringstream msg;
      msg << "warning: grid not converged (ratio " << r.grid_convergence_ratio << " > "
          << kGridGate << "); slopes are not meaningful";
      say(options, msg.str());
    }
  }
  return r;
}

SupportGrowthResult support_growth_study(const StudyConfig& config) {
  config.validate();
  const PhysParams params = config.params(0.0);
  const Field rho0 = make_initial_field(config);
  const double mass = integrate(rho0);
  if (!(max_value(rho0) > 0.0) || !(mass > 0.0))
    throw ValidationError("support_growth_study: initial datum has no mass");
  const double t0 = config.t_start();
  std::vector<double> times;
  for (double s : config.snapshot_times)
    if (s > t0) times.push_back(s);
  if (times.size() < 3) throw ValidationError("support_growth_study: need at least 3 snapshot times after the start");

  double center = 0.0;
  for (std::size_t i = 0; i < rho0.size(); ++i) center += rho0.grid().center(i) * rho0[i];
  center *= rho0.grid().dx() / mass;

  const double thr = config.thresholds.support;
  const Interface initial = interface_positions(rho0, thr);
  const std::vector<PmeState> states = pme_solve_path(PmeState{t0, rho0}, params, times);

  SupportGrowthResult out;
  const bool self_similar = config.initial_datum.kind == DatumKind::Barenblatt;
  out.offset = self_similar ? center : initial.right;
  for (const PmeState& s : states) {
    out.times.push_back(s.t);
    out.s_right.push_back(interface_positions(s, thr).right);
    out.max_rho.push_back(max_value(s.rho));
  }
  const double w0 = initial.right - center;
  const double w1 = out.s_right.back() - center;
  if (!(w1 >= 2.0 * w0)) {
    std::ostringstream msg;
    msg << "support_growth_study: insufficient growth, half-width " << w0 << " -> " << w1
        << " (need a factor 2); raise t_end";
    throw ValidationError(msg.str());
  }
  std::vector<double> ts, ws;
  for (std::size_t k = 0; k < out.times.size(); ++k) {
    const double w = out.s_right[k] - out.offset;
    if (w > 0.0) {
      ts.push_back(out.times[k]);
      ws.push_back(w);
    }
  }
  if (ts.size() < 3) throw ValidationError("support_growth_study: support did not move");
  out.exponent = fit_loglog_slope(ts, ws);
  out.decay = fit_loglog_slope(out.times, out.max_rho);
  return out;
}

}  // namespace hicomp
