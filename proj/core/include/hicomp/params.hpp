#pragma once

#include <cmath>
#include <optional>

namespace hicomp {

/// Model constants shared by both solvers.
///
/// alpha is the viscosity exponent (mu(rho) = rho^alpha), gamma the pressure
/// exponent, epsilon the pressure scaling and pme_coeff the diffusion
/// normalization c of d_t rho = c d_xx rho^alpha. epsilon = 0 is accepted as
/// the pressureless limit.
struct PhysParams {
  double alpha = 1.25;
  double gamma = 2.0;
  double epsilon = 1e-2;
  double pme_coeff = 1.0 / 1.25;

  /// Validated construction; pme_coeff defaults to 1/alpha.
  static PhysParams make(double alpha, double gamma, double epsilon,
                         std::optional<double> pme_coeff = std::nullopt);

  /// Throws ValidationError naming the violated invariant.
  void validate() const;

  PhysParams with_epsilon(double eps) const;
};

/// x^e with exact fast paths for the exponents the solvers hit most often.
/// Both solvers route every power through here, which keeps them bitwise comparable.
inline double spow(double x, double e) {
  if (e == 1.0) return x;
  if (e == 2.0) return x * x;
  if (e == 0.5) return std::sqrt(x);
  if (e == 0.25) return std::sqrt(std::sqrt(x));
  return std::pow(x, e);
}

}  // namespace hicomp
