#include "hicomp/pme.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hicomp/error.hpp"

namespace hicomp {

namespace {

constexpr double kDtSlack = 1.0 + 1e-12;
constexpr std::size_t kMarginCheckInterval = 128;

std::vector<double> powers(std::span<const double> v, double e) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = spow(v[i], e);
  return out;
}

}  // namespace

void diffusive_face_fluxes(std::span<const double> p, double coeff, double dx,
                           std::vector<double>& fluxes) {
  const std::size_t n = p.size();
  fluxes.resize(n - 1);
  const double scale = coeff / dx;
  for (std::size_t i = 0; i + 1 < n; ++i) fluxes[i] = -scale * (p[i + 1] - p[i]);
}

double pme_stable_dt(const PmeState& state, const PhysParams& params) {
  const double peak = std::max(max_value(state.rho), 0.0);
  const double diffusivity = params.pme_coeff * params.alpha * spow(peak, params.alpha - 1.0);
  const double dx = state.rho.grid().dx();
  if (diffusivity <= 0.0) return std::numeric_limits<double>::infinity();
  return dx * dx / (2.0 * diffusivity);
}

PmeState pme_step(const PmeState& state, const PhysParams& params, double dt,
                  double* clipped_mass) {
  if (!(dt >= 0.0)) throw ValidationError("pme_step: dt must be nonnegative");
  const double limit = pme_stable_dt(state, params);
  if (dt > limit * kDtSlack) {
    std::ostringstream msg;
    msg << "pme_step: dt=" << dt << " exceeds stability limit " << limit;
    throw ValidationError(msg.str());
  }
  const Grid& g = state.rho.grid();
  const auto rho = state.rho.values();
  const std::size_t n = rho.size();
  const std::vector<double> p = powers(rho, params.alpha);
  std::vector<double> flux;
  diffusive_face_fluxes(p, params.pme_coeff, g.dx(), flux);

  const double lambda = dt / g.dx();
  std::vector<double> next(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f_right = (i + 1 < n) ? flux[i] : 0.0;
    const double f_left = (i > 0) ? flux[i - 1] : 0.0;
    next[i] = rho[i] - lambda * (f_right - f_left);
  }
  double clipped = 0.0;
  for (double& v : next) {
    if (v < 0.0) {
      clipped -= v;
      v = 0.0;
    }
  }
  if (clipped_mass) *clipped_mass = clipped * g.dx();
  return PmeState{state.t + dt, Field(g, std::move(next))};
}

PmeState pme_solve_to(PmeState state, const PhysParams& params, double t_end,
                      const PmeObserver& observer) {
  const double times[] = {t_end};
  return std::move(pme_solve_path(std::move(state), params, times, observer).back());
}

std::vector<PmeState> pme_solve_path(PmeState state, const PhysParams& params,
                                     std::span<const double> times,
                                     const PmeObserver& observer) {
  const PmeStepRule rule = [&params](const PmeState& s) {
    return kPmeCfl * pme_stable_dt(s, params);
  };
  return pme_solve_path(std::move(state), params, times, rule, observer);
}

std::vector<PmeState> pme_solve_path(PmeState state, const PhysParams& params,
                                     std::span<const double> times, const PmeStepRule& rule,
                                     const PmeObserver& observer) {
  params.validate();
  std::size_t since_check = 0;
  std::vector<PmeState> out;
  out.reserve(times.size());
  double previous = state.t;
  for (double target : times) {
    if (!(target >= previous)) {
      throw ValidationError("pme_solve_path: times must be sorted and not earlier than the state");
    }
    previous = target;
    while (state.t < target) {
      double dt = rule(state);
      if (!(dt > 0.0)) throw SolverError("pme_solve_path: step rule returned a nonpositive dt");
      bool last = false;
      if (state.t + dt >= target) {
        dt = target - state.t;
        last = true;
      }
      state = pme_step(state, params, dt);
      if (last) state.t = target;
      if (observer) observer(state, dt);
      if (++since_check >= kMarginCheckInterval) {
        check_support_margin(state.rho, kDefaultSupportThreshold);
        since_check = 0;
      }
    }
    check_support_margin(state.rho, kDefaultSupportThreshold);
    out.push_back(state);
  }
  return out;
}

Field pme_pressure(const PmeState& state, const PhysParams& params) {
  const double a = params.alpha;
  const double scale = a / (a - 1.0);
  std::vector<double> v(state.rho.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = scale * spow(state.rho[i], a - 1.0);
  return Field(state.rho.grid(), std::move(v));
}

Interface interface_positions(const Field& rho, double threshold) {
  const double peak = max_value(rho);
  if (!(peak > 0.0)) throw ValidationError("interface_positions: field has no positive values");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ValidationError("interface_positions: threshold must lie in (0, 1)");
  }
  const double level = threshold * peak;
  const Grid& g = rho.grid();
  std::size_t first = rho.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (rho[i] > level) {
      first = std::min(first, i);
      last = i;
    }
  }
  const double half = 0.5 * g.dx();
  return Interface{g.center(first) - half, g.center(last) + half};
}

Interface interface_positions(const PmeState& state, double threshold) {
  return interface_positions(state.rho, threshold);
}

}  // namespace hicomp
