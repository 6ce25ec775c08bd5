#pragma once

#include "hicomp/cns.hpp"
#include "hicomp/grid.hpp"
#include "hicomp/params.hpp"
#include "hicomp/pme.hpp"

namespace hicomp {

/// Per-snapshot entropy and regularity measurements of a Navier-Stokes state.
struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;                ///< int rho u^2/2 + eps rho^gamma/(gamma-1)
  double bd_entropy = 0.0;            ///< int rho v^2/2 + eps rho^gamma/(gamma-1)
  double sqrt_rho_v_l2 = 0.0;         ///< ||sqrt(rho) v||_L2
  double dx_rho_alpha_half_l2 = 0.0;  ///< ||d_x rho^{alpha-1/2}||_L2
  double max_rho = 0.0;
  double viscous_flux_l2 = 0.0;       ///< ||rho^alpha d_x u||_L2
};

/// Homogeneous H^{-1} seminorm ||antiderivative(f)||_L2 of a zero-mean field.
/// Rejects |int f| > 1e-8 ||f||_L1, reporting the measured mean.
double h_minus1_norm(const Field& f);

struct ErrorPair {
  double h1;  ///< H^{-1} distance
  double l2;  ///< L^2 distance
};

ErrorPair error_pair(const Field& rho_eps, const Field& rho_tilde);

DiagnosticsRecord diagnostics(const CnsState& state, const PhysParams& params);

/// Mass of rho_eps over cells whose centers lie outside [omega.left, omega.right],
/// with `floor` subtracted from each counted cell.
double mass_outside_support(const Field& rho_eps, const Interface& omega, double floor = 0.0);

/// Mass of |rho_eps - rho_tilde| over cells whose centers lie outside omega. Equals the
/// leaked Navier-Stokes mass when rho_tilde vanishes there, without counting the
/// reference's own sub-threshold tail.
double excess_mass_outside(const Field& rho_eps, const Field& rho_tilde, const Interface& omega);

/// Right side of the effective-velocity bound,
/// eps^{1/2} (gamma-1)^{-1/2} ||rho0||_{L^gamma}^{gamma/2}.
double effective_velocity_bound(const Field& rho0, const PhysParams& params);

/// Sub-cell reconstruction of the right free boundary from the pressure: a least
/// squares line through the pressure of the last three cells strictly inside the
/// support, extrapolated to zero. A cell counts as strictly inside when its pressure
/// is at least half that of its left neighbour, which excludes the partially filled
/// edge cell and the numerical precursor.
struct PressureFront {
  double position;  ///< zero crossing of the fitted line
  double slope;     ///< one-sided pressure gradient D^-_x v~
  std::size_t first_cell;  ///< first of the three fitted cells
};

PressureFront right_pressure_front(const PmeState& state, const PhysParams& params,
                                   double threshold = kDefaultSupportThreshold);

struct DarcyProbe {
  double front_speed;     ///< D^+ s over the probe interval
  double pressure_slope;  ///< D^-_x v~ at the start of the probe
  double residual;        ///< |D^+ s + c D^-_x v~|, c = pme_coeff
  double max_slope;       ///< max |d_x v~| over the grid
  double dt_probe;
};

/// Number of stability-limited steps used when dt_probe is not given.
inline constexpr int kDarcyProbeSteps = 10;

/// Darcy law check at the right interface: D^+ s = -c D^-_x v~ for d_t rho = c d_xx rho^alpha.
/// dt_probe <= 0 selects the default of ten stability-limited steps.
/// Throws SolverError if the support vanishes.
DarcyProbe darcy_probe(const PmeState& state, const PhysParams& params, double dt_probe = 0.0,
                       double threshold = kDefaultSupportThreshold);

/// Darcy check with the front speed timed from interface arrivals: the explicit
/// front advances one cell at a time, so D^+ s is taken between the first cell
/// the threshold interface enters after state.t and the cell `cells` further on.
/// The pressure slope is averaged over the same window, which keeps the law exact
/// in the continuum. dt_probe in the result is the time from state.t to the last arrival.
DarcyProbe darcy_probe_arrivals(const PmeState& state, const PhysParams& params, int cells = 4,
                                double threshold = kDefaultSupportThreshold);

double darcy_residual(const PmeState& state, const PhysParams& params, double dt_probe = 0.0);

}  // namespace hicomp
