#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hicomp/grid.hpp"
#include "hicomp/params.hpp"

namespace hicomp {

/// Limit density rho~ at time t. The pressure alpha/(alpha-1) rho~^{alpha-1} is derived.
struct PmeState {
  double t = 0.0;
  Field rho;
};

inline constexpr double kPmeCfl = 0.4;
inline constexpr double kDefaultSupportThreshold = 1e-6;

/// Face fluxes F_{i+1/2} = -coeff (P_{i+1} - P_i) / dx of P = rho^alpha on the n-1
/// interior faces. The two boundary faces carry zero flux and are not stored.
/// Shared by both solvers so the pressureless reduction is exact.
void diffusive_face_fluxes(std::span<const double> rho_pow_alpha, double coeff, double dx,
                           std::vector<double>& fluxes);

/// Explicit stability limit dx^2 / (2 c alpha max(rho)^{alpha-1}).
double pme_stable_dt(const PmeState& state, const PhysParams& params);

/// One conservative explicit step with zero-flux boundaries.
/// Rejects dt above the stability limit. If clipped_mass is given it receives the
/// mass removed by clipping negative values (zero for a monotone step).
PmeState pme_step(const PmeState& state, const PhysParams& params, double dt,
                  double* clipped_mass = nullptr);

using PmeObserver = std::function<void(const PmeState&, double dt)>;

/// Steps with dt = 0.4 * stability limit, landing exactly on t_end.
PmeState pme_solve_to(PmeState state, const PhysParams& params, double t_end,
                      const PmeObserver& observer = {});

/// Like pme_solve_to but returns the states at each of the sorted `times`
/// (all >= state.t); the last entry is the state at times.back().
std::vector<PmeState> pme_solve_path(PmeState state, const PhysParams& params,
                                     std::span<const double> times,
                                     const PmeObserver& observer = {});

/// Proposed step size for a state; the solver shortens it to land on targets.
using PmeStepRule = std::function<double(const PmeState&)>;

/// pme_solve_path with a caller-chosen step rule. The rule must respect the
/// stability limit; pme_step rejects larger steps.
std::vector<PmeState> pme_solve_path(PmeState state, const PhysParams& params,
                                     std::span<const double> times, const PmeStepRule& rule,
                                     const PmeObserver& observer = {});

/// Pointwise pressure alpha/(alpha-1) rho^{alpha-1}.
Field pme_pressure(const PmeState& state, const PhysParams& params);

struct Interface {
  double left;
  double right;
  double width() const { return right - left; }
};

/// Outer edges of the cells with rho > threshold * max(rho).
/// Throws ValidationError if max(rho) is not positive.
Interface interface_positions(const Field& rho, double threshold = kDefaultSupportThreshold);
Interface interface_positions(const PmeState& state,
                              double threshold = kDefaultSupportThreshold);

}  // namespace hicomp
