#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hicomp/analysis.hpp"
#include "hicomp/config.hpp"
#include "hicomp/duality.hpp"

namespace hicomp {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least squares fit of log y against log x. Needs at least 3 positive points
/// and two distinct xs.
SlopeFit fit_loglog_slope(std::span<const double> xs, std::span<const double> ys);

/// Runs task(i) for i in [0, count) on up to `jobs` threads. Exceptions are
/// rethrown after all workers stop, lowest index first.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& task);

/// Worker count: `requested` if positive, else HICOMP_JOBS, else hardware concurrency.
unsigned resolve_jobs(int requested);

struct StudyOptions {
  unsigned jobs = 1;
  bool certificates = true;
  /// Overrides config.grid_check when set to false.
  bool grid_check = true;
  std::function<void(const std::string&)> log;
};

/// Per-epsilon summary of one Navier-Stokes run.
struct EpsRun {
  double epsilon = 0.0;
  std::vector<DiagnosticsRecord> diagnostics;  ///< one per snapshot
  double sup_sqrt_rho_v = 0.0;                 ///< over every recorded sample
  double velocity_bound = 0.0;                 ///< 1.05 x the BD entropy bound
  double mass_drift = 0.0;                     ///< relative, final vs initial
  double floored_mass = 0.0;
  std::size_t steps = 0;
  std::vector<DualCertificate> certificates;   ///< one per configured theta
};

/// Matrices are indexed [snapshot][epsilon]; epsilons are sorted decreasing.
struct RateStudyResult {
  double alpha = 0.0;
  double gamma = 0.0;
  std::vector<double> t_snapshots;
  std::vector<double> eps_values;
  std::vector<std::vector<double>> errors_h1;
  std::vector<std::vector<double>> errors_l2;
  /// int over the complement of the PME support of |rho_eps - rho~|.
  std::vector<std::vector<double>> mass_outside;
  /// mass_outside_support(rho_eps, omega, floor) as defined literally.
  std::vector<std::vector<double>> mass_outside_raw;
  std::vector<Interface> supports;  ///< PME support per snapshot
  SlopeFit slope_h1;
  SlopeFit slope_l2;
  SlopeFit slope_mass;
  SlopeFit slope_mass_raw;
  std::vector<SlopeFit> snapshot_slopes_h1;
  std::vector<SlopeFit> snapshot_slopes_l2;
  std::vector<SlopeFit> snapshot_slopes_mass;
  SlopeFit slope_support_growth;  ///< log(s_right - b1) against log t, PME run
  double grid_convergence_ratio = 0.0;  ///< max relative change of h1 and l2 at n/2
  double grid_change_mass = 0.0;        ///< same for mass_outside, reported only
  bool grid_checked = false;
  bool grid_converged = false;
  bool l2_hypothesis_holds = true;  ///< alpha <= 3/2
  std::vector<EpsRun> runs;         ///< aligned with eps_values
};

/// Errors between Navier-Stokes runs and the PME reference at every snapshot,
/// log-log fits at the final snapshot, the n/2 grid check and dual certificates.
RateStudyResult run_rate_study(const StudyConfig& config, const StudyOptions& options = {});

struct SupportGrowthResult {
  SlopeFit exponent;      ///< support edge against t
  SlopeFit decay;         ///< max density against t
  std::vector<double> times;
  std::vector<double> s_right;
  std::vector<double> max_rho;
  double offset = 0.0;    ///< b1, subtracted before the fit (0 for Barenblatt data)
};

/// Evolves the PME from the configured datum and fits the support growth and the
/// decay of the maximum over the snapshot times. Barenblatt data are fitted
/// directly in log s_right, other data in log(s_right - b1).
SupportGrowthResult support_growth_study(const StudyConfig& config);

/// The PME reference through the given times using the Navier-Stokes step rule at
/// epsilon = 0, so it shares the time discretization of the epsilon runs.
std::vector<Field> matched_reference_path(const Field& rho0, double t0, const PhysParams& params,
                                          std::span<const double> times);

}  // namespace hicomp
