#include "hicomp/duality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hicomp/error.hpp"

namespace hicomp {

namespace {

constexpr double kCoincidence = 1e-12;

double dot(std::span<const double> a, std::span<const double> b, double dx) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return dx * s;
}

// Zero-flux Laplacian; self-adjoint in the cell inner product.
void neumann_laplacian(std::span<const double> f, double dx, std::vector<double>& out) {
  const std::size_t n = f.size();
  out.assign(n, 0.0);
  const double s = 1.0 / (dx * dx);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double jump = (f[i + 1] - f[i]) * s;
    out[i] += jump;
    out[i + 1] -= jump;
  }
}

void forward_difference(std::span<const double> f, double dx, std::vector<double>& out) {
  out.resize(f.size() - 1);
  for (std::size_t i = 0; i + 1 < f.size(); ++i) out[i] = (f[i + 1] - f[i]) / dx;
}

void check_path(const FieldPath& path, const FieldPath& ref, const char* what) {
  if (path.times.size() != path.fields.size())
    throw ValidationError(std::string("dual_certificate: ") + what +
                          " has mismatched time and field counts");
  if (path.size() != ref.size())
    throw ValidationError(std::string("dual_certificate: ") + what +
                          " has a different number of samples");
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (path.times[k] != ref.times[k])
      throw ValidationError(std::string("dual_certificate: ") + what +
                            " time stamps differ from rho_eps");
    require_same_grid(path.fields[k], ref.fields.front(), "dual_certificate");
  }
}

}  // namespace

void FieldPath::push_back(double t, Field f) {
  if (!times.empty() && !(t > times.back()))
    throw ValidationError("FieldPath: time stamps must increase");
  times.push_back(t);
  fields.push_back(std::move(f));
}

void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n)
    throw ValidationError("solve_tridiagonal: size mismatch");
  if (n == 0) return;
  std::vector<double> c(n);
  double pivot = diag[0];
  for (std::size_t i = 0;; ++i) {
    if (!(std::abs(pivot) > 0.0) || !std::isfinite(pivot))
      throw SolverError("solve_tridiagonal: vanishing pivot");
    c[i] = upper[i] / pivot;
    rhs[i] /= pivot;
    if (i + 1 == n) break;
    pivot = diag[i + 1] - lower[i + 1] * c[i];
    rhs[i + 1] -= lower[i + 1] * rhs[i];
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

double quotient_coefficient(double a, double b, double alpha) {
  const double diff = a - b;
  if (std::abs(diff) < kCoincidence) {
    const double mid = 0.5 * (a + b);
    return alpha * spow(std::max(mid, 0.0), alpha - 1.0);
  }
  return (spow(a, alpha) - spow(b, alpha)) / diff;
}

ClampRange default_clamp(const FieldPath& rho_eps, const FieldPath& rho_tilde,
                         const PhysParams& params) {
  double peak = 0.0;
  for (const auto* path : {&rho_eps, &rho_tilde})
    for (const Field& f : path->fields) peak = std::max(peak, max_value(f));
  const double scale = params.alpha * spow(peak, params.alpha - 1.0);
  return {1e-3 * scale, 10.0 * scale};
}

Field unit_gradient_bump(const Grid& grid, double center, double radius) {
  if (!(radius > 0.0)) throw ValidationError("unit_gradient_bump: radius must be positive");
  Field raw = Field::from_function(grid, [&](double x) {
    const double r = (x - center) / radius;
    const double w = 1.0 - r * r;
    return w > 0.0 ? w * w * w : 0.0;
  });
  std::vector<double> grad;
  forward_difference(raw.values(), grid.dx(), grad);
  double g2 = 0.0;
  for (double g : grad) g2 += g * g;
  const double norm = std::sqrt(grid.dx() * g2);
  if (!(norm > 0.0)) throw ValidationError("unit_gradient_bump: bump not resolved by the grid");
  return (1.0 / norm) * std::move(raw);
}

DualCertificate dual_certificate(const FieldPath& rho_eps, const FieldPath& rho_tilde,
                                 const FieldPath& momentum, const Field& theta,
                                 std::optional<double> eta_in, std::optional<double> cap_in,
                                 const PhysParams& params) {
  params.validate();
  if (rho_eps.size() < 2) throw ValidationError("dual_certificate: need at least two samples");
  check_path(rho_eps, rho_eps, "rho_eps");
  check_path(rho_tilde, rho_eps, "rho_tilde");
  check_path(momentum, rho_eps, "momentum");
  require_same_grid(theta, rho_eps.fields.front(), "dual_certificate theta");

  const double theta_peak = lp_norm(theta, kInfinityNorm);
  const std::size_t n = theta.size();
  if (std::abs(theta[0]) > 1e-12 * theta_peak || std::abs(theta[n - 1]) > 1e-12 * theta_peak)
    throw ValidationError("dual_certificate: theta must vanish at the grid boundary");

  const ClampRange defaults = default_clamp(rho_eps, rho_tilde, params);
  const double eta = eta_in.value_or(defaults.eta);
  const double cap = cap_in.value_or(defaults.cap);
  if (!(eta > 0.0) || !(cap > eta)) {
    std::ostringstream msg;
    msg << "dual_certificate: clamp range violated (eta=" << eta << ", cap=" << cap << ")";
    throw ValidationError(msg.str());
  }

  const double alpha = params.alpha;
  const double inv_alpha = 1.0 / alpha;
  const double dx = theta.grid().dx();
  const std::size_t steps = rho_eps.size() - 1;

  std::vector<std::vector<double>> r(steps + 1, std::vector<double>(n));
  std::vector<std::vector<double>> p(steps + 1, std::vector<double>(n));
  std::vector<std::vector<double>> a(steps + 1, std::vector<double>(n));
  std::vector<std::vector<double>> an(steps + 1, std::vector<double>(n));
  std::size_t clamped = 0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const auto re = rho_eps.fields[k].values();
    const auto rt = rho_tilde.fields[k].values();
    for (std::size_t i = 0; i < n; ++i) {
      r[k][i] = re[i] - rt[i];
      p[k][i] = spow(re[i], alpha) - spow(rt[i], alpha);
      a[k][i] = quotient_coefficient(re[i], rt[i], alpha);
      an[k][i] = std::clamp(a[k][i], eta, cap);
      if (an[k][i] != a[k][i]) ++clamped;
    }
  }

  DualCertificate cert{.eta = eta, .cap = cap, .theta = theta};
  cert.lhs = dot(r[steps], theta.values(), dx);

  std::vector<double> psi(theta.values().begin(), theta.values().end());
  std::vector<double> lower(n), diag(n), upper(n), lap, grad, lap_p, face_m(n - 1);
  {
    forward_difference(psi, dx, grad);
    cert.theta_gradient = std::sqrt(dot(grad, grad, dx));
  }

  double coeff_sum = 0.0, momentum_sum = 0.0, direct_sum = 0.0;
  double mismatch2 = 0.0, flux2 = 0.0, grad2 = 0.0, wlap2 = 0.0, mom2 = 0.0;
  for (std::size_t k = steps; k-- > 0;) {
    const double dt = rho_eps.times[k + 1] - rho_eps.times[k];
    // (I - dt/alpha diag(a_n^{k+1}) Lap) psi^k = psi^{k+1}
    for (std::size_t i = 0; i < n; ++i) {
      const double rr = dt * inv_alpha * an[k + 1][i] / (dx * dx);
      lower[i] = (i > 0) ? -rr : 0.0;
      upper[i] = (i + 1 < n) ? -rr : 0.0;
      diag[i] = 1.0 + rr * static_cast<double>((i > 0) + (i + 1 < n));
    }
    solve_tridiagonal(lower, diag, upper, psi);

    neumann_laplacian(psi, dx, lap);
    forward_difference(psi, dx, grad);

    // Transport remainder Q = R^{k+1} - R^k - dt/alpha Lap P^{k+1} = -dt D G.
    neumann_laplacian(p[k + 1], dx, lap_p);
    double running = 0.0;
    double pair = 0.0, g2 = 0.0, direct = 0.0;
    const auto m0 = momentum.fields[k].values();
    const auto m1 = momentum.fields[k + 1].values();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double q = r[k + 1][i] - r[k][i] - dt * inv_alpha * lap_p[i];
      running += q;
      const double g = -dx * running / dt;
      pair += g * grad[i];
      g2 += g * g;
      face_m[i] = 0.25 * (m0[i] + m0[i + 1] + m1[i] + m1[i + 1]);
      direct += face_m[i] * grad[i];
    }
    momentum_sum += dt * dx * pair;
    direct_sum += dt * dx * direct;
    flux2 += dt * dx * g2;

    double coeff = 0.0, mis = 0.0, wl = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double gap = (a[k + 1][i] - an[k + 1][i]) * r[k + 1][i];
      coeff += gap * lap[i];
      mis += gap * gap / an[k + 1][i];
      wl += an[k + 1][i] * lap[i] * lap[i];
    }
    coeff_sum += dt * inv_alpha * dx * coeff;
    mismatch2 += dt * dx * mis;
    wlap2 += dt * dx * wl;
    grad2 += dt * dot(grad, grad, dx);
    mom2 += 0.5 * dt * (dot(m0, m0, dx) + dot(m1, m1, dx));
  }

  cert.initial_term = dot(r[0], psi, dx);
  cert.rhs_coeff_term = coeff_sum;
  cert.rhs_momentum_term = momentum_sum;
  cert.momentum_term_direct = direct_sum;
  cert.identity_residual =
      std::abs(cert.lhs - cert.initial_term - cert.rhs_coeff_term - cert.rhs_momentum_term);
  cert.identity_scale = std::abs(cert.lhs) + std::abs(cert.initial_term) +
                        std::abs(cert.rhs_coeff_term) + std::abs(cert.rhs_momentum_term);
  cert.coeff_mismatch = std::sqrt(mismatch2);
  cert.flux_l2 = std::sqrt(flux2);
  cert.momentum_l2 = std::sqrt(mom2);
  cert.dual_gradient_l2 = std::sqrt(grad2);
  cert.dual_weighted_lap = std::sqrt(wlap2);
  cert.bound = std::abs(cert.initial_term) +
               inv_alpha * cert.coeff_mismatch * cert.dual_weighted_lap +
               cert.flux_l2 * cert.dual_gradient_l2;
  const double horizon = rho_eps.times.back() - rho_eps.times.front();
  const double scale = cert.theta_gradient * std::sqrt(params.epsilon * horizon);
  cert.measured_c = scale > 0.0 ? cert.bound / scale : std::numeric_limits<double>::quiet_NaN();
  cert.clamped_fraction =
      static_cast<double>(clamped) / static_cast<double>((steps + 1) * n);
  return cert;
}

}  // namespace hicomp
