#include "hicomp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hicomp/error.hpp"

namespace hicomp {

double h_minus1_norm(const Field& f) {
  const double mean = integrate(f);
  const double l1 = lp_norm(f, 1.0);
  if (std::abs(mean) > 1e-8 * l1) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "h_minus1_norm: input is not zero-mean (integral " << mean << ", L1 norm " << l1
        << ")";
    throw ValidationError(msg.str());
  }
  return lp_norm(antiderivative(f), 2.0);
}

ErrorPair error_pair(const Field& rho_eps, const Field& rho_tilde) {
  require_same_grid(rho_eps, rho_tilde, "error_pair");
  const Field diff = rho_eps - rho_tilde;
  return ErrorPair{h_minus1_norm(diff), lp_norm(diff, 2.0)};
}

DiagnosticsRecord diagnostics(const CnsState& state, const PhysParams& params) {
  const Grid& g = state.rho.grid();
  const std::size_t n = state.rho.size();
  const double a = params.alpha;
  const Field v = effective_velocity(state);
  const Field u = v - dx_phi(state, params);
  const Field du = derivative(u);

  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = spow(state.rho[i], a - 0.5);
  const Field dq = derivative(Field(g, std::move(q)));

  double kin_u = 0.0, kin_v = 0.0, internal = 0.0, visc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = state.rho[i];
    kin_u += 0.5 * r * u[i] * u[i];
    kin_v += 0.5 * r * v[i] * v[i];
    internal += params.epsilon / (params.gamma - 1.0) * spow(r, params.gamma);
    const double flux = spow(r, a) * du[i];
    visc += flux * flux;
  }
  const double dx = g.dx();
  DiagnosticsRecord rec;
  rec.t = state.t;
  rec.mass = integrate(state.rho);
  rec.energy = dx * (kin_u + internal);
  rec.bd_entropy = dx * (kin_v + internal);
  rec.sqrt_rho_v_l2 = std::sqrt(2.0 * dx * kin_v);
  rec.dx_rho_alpha_half_l2 = lp_norm(dq, 2.0);
  rec.max_rho = max_value(state.rho);
  rec.viscous_flux_l2 = std::sqrt(dx * visc);
  return rec;
}

double mass_outside_support(const Field& rho_eps, const Interface& omega, double floor) {
  if (!(omega.left < omega.right)) {
    throw ValidationError("mass_outside_support: interval must satisfy s_left < s_right");
  }
  const Grid& g = rho_eps.grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < rho_eps.size(); ++i) {
    const double x = g.center(i);
    if (x < omega.left || x > omega.right) sum += rho_eps[i] - floor;
  }
  return g.dx() * sum;
}

double excess_mass_outside(const Field& rho_eps, const Field& rho_tilde, const Interface& omega) {
  require_same_grid(rho_eps, rho_tilde, "excess_mass_outside");
  if (!(omega.left < omega.right)) {
    throw ValidationError("excess_mass_outside: interval must satisfy s_left < s_right");
  }
  const Grid& g = rho_eps.grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < rho_eps.size(); ++i) {
    const double x = g.center(i);
    if (x < omega.left || x > omega.right) sum += std::abs(rho_eps[i] - rho_tilde[i]);
  }
  return g.dx() * sum;
}

double effective_velocity_bound(const Field& rho0, const PhysParams& params) {
  params.validate();
  double s = 0.0;
  for (double r : rho0.values()) s += spow(std::max(r, 0.0), params.gamma);
  return std::sqrt(params.epsilon / (params.gamma - 1.0) * rho0.grid().dx() * s);
}

namespace {

constexpr std::size_t kArrivalStepLimit = 50'000'000;

// Least squares line through the pressure of cells first .. first+2.
PressureFront front_from_cells(const PmeState& state, const PhysParams& params,
                               std::size_t first, double fallback) {
  const Grid& g = state.rho.grid();
  const double k = 3.0;
  const double scale = params.alpha / (params.alpha - 1.0);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = first; i < first + 3; ++i) {
    const double x = g.center(i);
    const double y = scale * spow(state.rho[i], params.alpha - 1.0);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / k;
  // A flat or rising pressure has no moving free boundary; report the cell edge.
  const double position = slope < 0.0 ? -intercept / slope : fallback;
  return PressureFront{position, slope, first};
}

}  // namespace

PressureFront right_pressure_front(const PmeState& state, const PhysParams& params,
                                   double threshold) {
  const Interface edge = interface_positions(state, threshold);
  const Grid& g = state.rho.grid();
  const auto last =
      static_cast<std::size_t>(std::lround((edge.right - g.x_min()) / g.dx())) - 1;
  // On a linear profile P_j >= P_{j-1}/2 holds exactly for cells at least one
  // width behind the front; the partially filled edge cell and the precursor fail it.
  std::size_t inner = last;
  const double e = params.alpha - 1.0;
  while (inner >= 1 && !(spow(state.rho[inner], e) >= 0.5 * spow(state.rho[inner - 1], e) &&
                         state.rho[inner] > 0.0))
    --inner;
  if (inner < 2) throw SolverError("right_pressure_front: support narrower than four cells");
  return front_from_cells(state, params, inner - 2, edge.right);
}

DarcyProbe darcy_probe(const PmeState& state, const PhysParams& params, double dt_probe,
                       double threshold) {
  if (dt_probe <= 0.0) dt_probe = kDarcyProbeSteps * kPmeCfl * pme_stable_dt(state, params);
  const PressureFront before = right_pressure_front(state, params, threshold);
  PmeState later = pme_solve_to(state, params, state.t + dt_probe);
  if (!(max_value(later.rho) > 0.0)) throw SolverError("darcy_probe: support lost during probe");
  // Same cells at both ends, so the estimate moves continuously with the profile.
  const PressureFront after =
      front_from_cells(later, params, before.first_cell,
                       interface_positions(later, threshold).right);

  const Field slope_field = derivative(pme_pressure(state, params));
  DarcyProbe probe;
  probe.dt_probe = dt_probe;
  probe.front_speed = (after.position - before.position) / dt_probe;
  probe.pressure_slope = before.slope;
  probe.residual = std::abs(probe.front_speed + params.pme_coeff * probe.pressure_slope);
  probe.max_slope = lp_norm(slope_field, kInfinityNorm);
  return probe;
}

DarcyProbe darcy_probe_arrivals(const PmeState& state, const PhysParams& params, int cells,
                                double threshold) {
  if (cells < 1) throw ValidationError("darcy_probe_arrivals: cells must be positive");
  const Grid& g = state.rho.grid();
  const double dx = g.dx();
  // Cell edges are multiples of dx; compare in cell units to avoid round-off.
  const auto cell_of = [&](const PmeState& s) {
    return std::lround((interface_positions(s, threshold).right - g.x_min()) / dx);
  };
  const long c0 = cell_of(state);

  PmeState s = state;
  double t_first = 0.0;
  long c_first = -1;
  double slope_prev = 0.0;
  double slope_integral = 0.0;
  for (std::size_t step = 0;; ++step) {
    if (step > kArrivalStepLimit)
      throw SolverError("darcy_probe_arrivals: interface did not advance");
    const double dt = kPmeCfl * pme_stable_dt(s, params);
    s = pme_step(s, params, dt);
    if (!(max_value(s.rho) > 0.0)) throw SolverError("darcy_probe: support lost during probe");
    const long c = cell_of(s);
    if (c_first < 0) {
      if (c > c0) {
        c_first = c;
        t_first = s.t;
        slope_prev = right_pressure_front(s, params, threshold).slope;
      }
      continue;
    }
    const double slope = right_pressure_front(s, params, threshold).slope;
    slope_integral += 0.5 * dt * (slope + slope_prev);
    slope_prev = slope;
    if (c >= c_first + cells) {
      const double window = s.t - t_first;
      DarcyProbe probe;
      probe.dt_probe = s.t - state.t;
      probe.front_speed = static_cast<double>(c - c_first) * dx / window;
      probe.pressure_slope = slope_integral / window;
      probe.residual = std::abs(probe.front_speed + params.pme_coeff * probe.pressure_slope);
      probe.max_slope = lp_norm(derivative(pme_pressure(state, params)), kInfinityNorm);
      return probe;
    }
  }
}

double darcy_residual(const PmeState& state, const PhysParams& params, double dt_probe) {
  return darcy_probe(state, params, dt_probe).residual;
}

}  // namespace hicomp
