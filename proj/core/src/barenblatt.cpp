#include "hicomp/barenblatt.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "hicomp/error.hpp"
#include "hicomp/params.hpp"

namespace hicomp {

namespace {

constexpr double kBracketLow = 1e-8;
constexpr double kBracketHigh = 1e8;
constexpr double kMassRelTol = 1e-10;

double scaled_time(const BarenblattParams& p, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw ValidationError("Barenblatt profile is only defined for t > 0");
  }
  return p.pme_coeff * t;
}

}  // namespace

double barenblatt_profile_mass(double alpha, double c_const) {
  const double kappa = (alpha - 1.0) / (2.0 * alpha * (alpha + 1.0));
  const double m = 1.0 / (alpha - 1.0);
  const double half_width = std::sqrt(c_const / kappa);
  // xi = half_width * sin(theta) removes the edge singularity of the integrand.
  auto integrand = [&](double theta) {
    const double c = std::cos(theta);
    return std::pow(c_const * c * c, m) * half_width * c;
  };
  const double half_pi = boost::math::constants::half_pi<double>();
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, -half_pi, half_pi, 15, 1e-13, &error);
  return value;
}

BarenblattParams barenblatt_params(double alpha, double mass, double pme_coeff) {
  if (!std::isfinite(alpha) || !(alpha > 1.0)) throw ValidationError("alpha must exceed 1");
  if (!std::isfinite(mass) || !(mass > 0.0)) throw ValidationError("mass must be positive");
  if (!std::isfinite(pme_coeff) || !(pme_coeff > 0.0)) {
    throw ValidationError("pme_coeff must be positive");
  }

  double lo = kBracketLow;
  double hi = kBracketHigh;
  if (barenblatt_profile_mass(alpha, lo) > mass || barenblatt_profile_mass(alpha, hi) < mass) {
    throw SolverError("Barenblatt constant not bracketed by [1e-8, 1e8] for mass " +
                      std::to_string(mass));
  }
  // Bisect in log space; the map is a pure power of C so this converges uniformly.
  double c_mid = std::sqrt(lo * hi);
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    c_mid = std::sqrt(lo * hi);
    const double m_mid = barenblatt_profile_mass(alpha, c_mid);
    if (std::abs(m_mid - mass) <= 0.01 * kMassRelTol * mass || hi / lo - 1.0 < 1e-15) {
      converged = true;
      break;
    }
    (m_mid < mass ? lo : hi) = c_mid;
  }
  const double achieved = barenblatt_profile_mass(alpha, c_mid);
  if (!converged || std::abs(achieved - mass) > kMassRelTol * mass) {
    throw SolverError("Barenblatt root finder did not converge");
  }
  return BarenblattParams{alpha, mass, (alpha - 1.0) / (2.0 * alpha * (alpha + 1.0)), c_mid,
                          pme_coeff};
}

double BarenblattParams::support_radius(double t) const {
  const double s = scaled_time(*this, t);
  return std::sqrt(c_const / kappa) * std::pow(s, 1.0 / (alpha + 1.0));
}

double BarenblattParams::peak(double t) const {
  const double s = scaled_time(*this, t);
  return std::pow(s, -1.0 / (alpha + 1.0)) * std::pow(c_const, 1.0 / (alpha - 1.0));
}

double BarenblattParams::edge_speed(double t) const {
  const double s = scaled_time(*this, t);
  const double beta = 1.0 / (alpha + 1.0);
  return std::sqrt(c_const / kappa) * beta * pme_coeff * std::pow(s, beta - 1.0);
}

double barenblatt_eval(const BarenblattParams& p, double t, double x) {
  const double s = scaled_time(p, t);
  const double scale = std::pow(s, -1.0 / (p.alpha + 1.0));
  const double xi = x * scale;
  const double base = p.c_const - p.kappa * xi * xi;
  if (base <= 0.0) return 0.0;
  return scale * std::pow(base, 1.0 / (p.alpha - 1.0));
}

Field barenblatt_field(const BarenblattParams& p, const Grid& grid, double t) {
  return Field::from_function(grid, [&](double x) { return barenblatt_eval(p, t, x); });
}

}  // namespace hicomp
