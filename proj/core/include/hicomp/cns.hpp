#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hicomp/grid.hpp"
#include "hicomp/params.hpp"

namespace hicomp {

/// Navier-Stokes unknowns in effective-velocity form: density rho >= rho_floor and
/// effective momentum rho v, with v = u + d_x phi(rho), phi'(rho) = rho^{alpha-2}.
struct CnsState {
  double t = 0.0;
  Field rho;
  Field momentum_v;
  double rho_floor = 0.0;
};

inline constexpr double kCnsCfl = 0.4;
inline constexpr double kDefaultRelativeFloor = 1e-10;

/// rho = max(rho0, floor) with floor = rel_floor * max(rho0), v = 0.
/// Rejects negative data and data whose support reaches the boundary margin.
CnsState well_prepared_init(const Field& rho0, const PhysParams& params,
                            double rel_floor = kDefaultRelativeFloor);

/// v = rho v / rho on cells above the floor, 0 on floor cells.
Field effective_velocity(const CnsState& state);

/// d_x phi(rho) = d_x(rho^{alpha-1}) / (alpha-1), bounded at vacuum.
Field dx_phi(const Field& rho, double alpha);
Field dx_phi(const CnsState& state, const PhysParams& params);

/// u = v - d_x phi(rho).
Field recover_u(const CnsState& state, const PhysParams& params);

/// 0.4 * min of the diffusive, advective and pressure-wave limits.
double cfl_dt(const CnsState& state, const PhysParams& params);

/// One explicit conservative step. Mass flux is the upwinded effective momentum plus
/// the shared diffusive flux; momentum is carried by the mass flux with upwinded v
/// and forced by the central source -eps d_x rho^gamma. Density is re-floored;
/// `floored_mass`, if given, receives the mass added by flooring.
CnsState cns_step(const CnsState& state, const PhysParams& params, double dt,
                  double* floored_mass = nullptr);

using CnsObserver = std::function<void(const CnsState&, double dt)>;

struct CnsRun {
  CnsState state;
  std::vector<CnsState> snapshots;
  double floored_mass = 0.0;
  std::size_t steps = 0;
  double min_dt = 0.0;
  double max_dt = 0.0;
};

/// Adaptive stepping with cfl_dt, landing exactly on every snapshot time and t_end.
CnsRun cns_solve_to(CnsState state, const PhysParams& params, double t_end,
                    std::span<const double> snapshot_times,
                    const CnsObserver& observer = {});

}  // namespace hicomp
