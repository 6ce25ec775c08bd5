#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hicomp/grid.hpp"
#include "hicomp/params.hpp"

namespace hicomp {

/// Fields sampled at increasing time stamps on one grid.
struct FieldPath {
  std::vector<double> times;
  std::vector<Field> fields;

  std::size_t size() const noexcept { return times.size(); }
  void push_back(double t, Field f);
};

/// Solves a x_{i-1} + b x_i + c x_{i+1} = d in place of d (Thomas algorithm).
/// lower[0] and upper[n-1] are ignored. Throws SolverError on a vanishing pivot.
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs);

/// Discrete duality certificate for R = rho_eps - rho_tilde at the final time.
///
/// The dual problem is advanced backward with implicit Euler on the zero-flux
/// Laplacian, which is the exact adjoint of the forward diffusive flux, so
///   lhs = initial_term + rhs_coeff_term + rhs_momentum_term
/// holds to round-off. The transport flux entering the momentum term is
/// reconstructed from the increments of R, so it is whatever flux the solvers used.
struct DualCertificate {
  double eta = 0.0;
  double cap = 0.0;
  Field theta;
  double lhs = 0.0;                 ///< int R(T) theta
  double initial_term = 0.0;        ///< int R(0) psi(0), zero for shared data
  double rhs_coeff_term = 0.0;      ///< sum dt/alpha <(a - a_n) R, Lap psi>
  double rhs_momentum_term = 0.0;   ///< sum dt <G, D+ psi>
  double momentum_term_direct = 0.0;///< same pairing with the recorded rho v path
  double identity_residual = 0.0;   ///< |lhs - initial - coeff - momentum|
  double identity_scale = 0.0;      ///< |lhs| + |initial| + |coeff| + |momentum|
  double coeff_mismatch = 0.0;      ///< sqrt(sum dt <(a - a_n)^2 R^2 / a_n>)
  double flux_l2 = 0.0;             ///< ||G||_{L2 L2}
  double momentum_l2 = 0.0;         ///< ||rho v||_{L2 L2}, trapezoid in time
  double dual_gradient_l2 = 0.0;    ///< sqrt(sum dt ||D+ psi||^2)
  double dual_weighted_lap = 0.0;   ///< sqrt(sum dt <a_n (Lap psi)^2>)
  double theta_gradient = 0.0;      ///< ||D+ theta||_L2
  double bound = 0.0;               ///< Cauchy-Schwarz bound on |lhs|
  double measured_c = 0.0;          ///< bound / (||D+ theta|| eps^{1/2} T^{1/2})
  double clamped_fraction = 0.0;    ///< share of (t, x) samples where a_n != a
};

/// Clamp defaults eta = 1e-3 alpha M^{alpha-1}, cap = 10 alpha M^{alpha-1}
/// with M the maximum density over both paths.
struct ClampRange {
  double eta;
  double cap;
};
ClampRange default_clamp(const FieldPath& rho_eps, const FieldPath& rho_tilde,
                         const PhysParams& params);

/// Quotient coefficient (a^alpha - b^alpha)/(a - b), alpha c^{alpha-1} at coincidence.
double quotient_coefficient(double a, double b, double alpha);

DualCertificate dual_certificate(const FieldPath& rho_eps, const FieldPath& rho_tilde,
                                 const FieldPath& momentum, const Field& theta,
                                 std::optional<double> eta, std::optional<double> cap,
                                 const PhysParams& params);

/// Smooth bump (1 - r^2)^3 on |x - center| < radius, normalized to ||D+ theta|| = 1.
Field unit_gradient_bump(const Grid& grid, double center, double radius);

}  // namespace hicomp
