#include "hicomp/cns.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hicomp/error.hpp"
#include "hicomp/pme.hpp"

namespace hicomp {

namespace {

constexpr double kDtSlack = 1.0 + 1e-12;
constexpr double kNegativeTolerance = 1e-6;
constexpr std::size_t kMarginCheckInterval = 128;

std::vector<double> velocity_values(const CnsState& s) {
  const auto rho = s.rho.values();
  const auto m = s.momentum_v.values();
  std::vector<double> v(rho.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = rho[i] > s.rho_floor ? m[i] / rho[i] : 0.0;
  return v;
}

}  // namespace

CnsState well_prepared_init(const Field& rho0, const PhysParams& params, double rel_floor) {
  params.validate();
  if (min_value(rho0) < 0.0) throw ValidationError("initial density must be nonnegative");
  const double peak = max_value(rho0);
  if (!(peak > 0.0)) throw ValidationError("initial density is identically zero");
  if (!(rel_floor > 0.0 && rel_floor < 1.0)) {
    throw ValidationError("relative density floor must lie in (0, 1)");
  }
  check_support_margin(rho0, kDefaultSupportThreshold);
  const double floor = rel_floor * peak;
  std::vector<double> rho(rho0.values().begin(), rho0.values().end());
  for (double& r : rho) r = std::max(r, floor);
  return CnsState{0.0, Field(rho0.grid(), std::move(rho)), Field::zeros(rho0.grid()), floor};
}

Field effective_velocity(const CnsState& state) {
  return Field(state.rho.grid(), velocity_values(state));
}

Field dx_phi(const Field& rho, double alpha) {
  std::vector<double> q(rho.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = spow(rho[i], alpha - 1.0);
  Field d = derivative(Field(rho.grid(), std::move(q)));
  d *= 1.0 / (alpha - 1.0);
  return d;
}

Field dx_phi(const CnsState& state, const PhysParams& params) {
  return dx_phi(state.rho, params.alpha);
}

Field recover_u(const CnsState& state, const PhysParams& params) {
  return effective_velocity(state) - dx_phi(state, params);
}

double cfl_dt(const CnsState& state, const PhysParams& params) {
  const Grid& g = state.rho.grid();
  const double dx = g.dx();
  const double a = params.alpha;

  double max_diff = 0.0;
  double max_sound = 0.0;
  for (double r : state.rho.values()) {
    max_diff = std::max(max_diff, spow(r, a - 1.0));
    max_sound = std::max(max_sound, params.epsilon * params.gamma * spow(r, params.gamma - 1.0));
  }
  const Field v = effective_velocity(state);
  const Field u = v - dx_phi(state, params);
  double max_speed = 1e-14;
  for (std::size_t i = 0; i < v.size(); ++i) {
    max_speed = std::max({max_speed, std::abs(u[i]), std::abs(v[i])});
  }

  const double inf = std::numeric_limits<double>::infinity();
  const double diffusive = max_diff > 0.0 ? dx * dx * a / (2.0 * max_diff) : inf;
  const double advective = dx / max_speed;
  const double acoustic = max_sound > 0.0 ? dx / std::sqrt(max_sound) : inf;
  return kCnsCfl * std::min({diffusive, advective, acoustic});
}

CnsState cns_step(const CnsState& state, const PhysParams& params, double dt,
                  double* floored_mass) {
  if (!(dt >= 0.0)) throw ValidationError("cns_step: dt must be nonnegative");
  const double limit = cfl_dt(state, params);
  if (dt > limit * kDtSlack) {
    std::ostringstream msg;
    msg << "cns_step: dt=" << dt << " violates the CFL limit " << limit;
    throw ValidationError(msg.str());
  }
  const Grid& g = state.rho.grid();
  const double dx = g.dx();
  const auto rho = state.rho.values();
  const auto m = state.momentum_v.values();
  const std::size_t n = rho.size();
  const std::vector<double> v = velocity_values(state);

  std::vector<double> p_alpha(n);
  std::vector<double> p_gamma(n);
  for (std::size_t i = 0; i < n; ++i) {
    p_alpha[i] = spow(rho[i], params.alpha);
    p_gamma[i] = spow(rho[i], params.gamma);
  }

  std::vector<double> mass_flux;
  diffusive_face_fluxes(p_alpha, 1.0 / params.alpha, dx, mass_flux);
  std::vector<double> mom_flux(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double v_face = 0.5 * (v[i] + v[i + 1]);
    const double m_up = v_face >= 0.0 ? m[i] : m[i + 1];
    mass_flux[i] = m_up + mass_flux[i];
    const double v_up = mass_flux[i] >= 0.0 ? v[i] : v[i + 1];
    mom_flux[i] = mass_flux[i] * v_up;
  }

  const double lambda = dt / dx;
  const double inv2dx = 1.0 / (2.0 * dx);
  std::vector<double> rho_next(n);
  std::vector<double> m_next(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool has_right = i + 1 < n;
    const bool has_left = i > 0;
    const double fr = has_right ? mass_flux[i] : 0.0;
    const double fl = has_left ? mass_flux[i - 1] : 0.0;
    const double gr = has_right ? mom_flux[i] : 0.0;
    const double gl = has_left ? mom_flux[i - 1] : 0.0;
    double dp;
    if (i == 0) {
      dp = (-3.0 * p_gamma[0] + 4.0 * p_gamma[1] - p_gamma[2]) * inv2dx;
    } else if (i + 1 == n) {
      dp = (3.0 * p_gamma[n - 1] - 4.0 * p_gamma[n - 2] + p_gamma[n - 3]) * inv2dx;
    } else {
      dp = (p_gamma[i + 1] - p_gamma[i - 1]) * inv2dx;
    }
    rho_next[i] = rho[i] - lambda * (fr - fl);
    m_next[i] = m[i] - lambda * (gr - gl) - dt * params.epsilon * dp;
  }

  const double peak = *std::max_element(rho.begin(), rho.end());
  double added = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(rho_next[i]) || !std::isfinite(m_next[i])) {
      throw SolverError("cns_step: non-finite state at cell " + std::to_string(i));
    }
    if (rho_next[i] < -kNegativeTolerance * peak) {
      std::ostringstream msg;
      msg << "cns_step: density " << rho_next[i] << " at x=" << g.center(i)
          << " fell below the floor tolerance (unstable step)";
      throw SolverError(msg.str());
    }
    if (rho_next[i] < state.rho_floor) {
      added += state.rho_floor - rho_next[i];
      rho_next[i] = state.rho_floor;
    }
  }
  if (floored_mass) *floored_mass = added * dx;
  return CnsState{state.t + dt, Field(g, std::move(rho_next)), Field(g, std::move(m_next)),
                  state.rho_floor};
}

CnsRun cns_solve_to(CnsState state, const PhysParams& params, double t_end,
                    std::span<const double> snapshot_times, const CnsObserver& observer) {
  params.validate();
  if (!(t_end >= state.t)) throw ValidationError("cns_solve_to: t_end precedes the state time");
  double previous = state.t;
  for (double s : snapshot_times) {
    if (!(s >= previous) || s > t_end) {
      throw ValidationError("cns_solve_to: snapshot times must be sorted within [t, t_end]");
    }
    previous = s;
  }

  std::vector<CnsState> snapshots;
  double floored_total = 0.0;
  std::size_t steps = 0;
  double min_dt = std::numeric_limits<double>::infinity();
  double max_dt = 0.0;
  std::vector<double> targets(snapshot_times.begin(), snapshot_times.end());
  const bool end_is_snapshot = !targets.empty() && targets.back() == t_end;
  if (!end_is_snapshot) targets.push_back(t_end);

  std::size_t since_check = 0;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const double target = targets[k];
    while (state.t < target) {
      double dt = cfl_dt(state, params);
      bool last = false;
      if (state.t + dt >= target) {
        dt = target - state.t;
        last = true;
      }
      double floored = 0.0;
      state = cns_step(state, params, dt, &floored);
      if (last) state.t = target;
      floored_total += floored;
      ++steps;
      min_dt = std::min(min_dt, dt);
      max_dt = std::max(max_dt, dt);
      if (observer) observer(state, dt);
      if (++since_check >= kMarginCheckInterval) {
        check_support_margin(state.rho, kDefaultSupportThreshold);
        since_check = 0;
      }
    }
    check_support_margin(state.rho, kDefaultSupportThreshold);
    if (k < snapshot_times.size()) snapshots.push_back(state);
  }
  if (steps == 0) min_dt = 0.0;
  return CnsRun{std::move(state), std::move(snapshots), floored_total, steps, min_dt, max_dt};
}

}  // namespace hicomp
