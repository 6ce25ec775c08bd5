#pragma once

#include "hicomp/grid.hpp"

namespace hicomp {

/// Self-similar compactly supported source solution of d_t U = c d_xx U^alpha:
///
///   U(t, x) = s^{-1/(alpha+1)} F(x s^{-1/(alpha+1)}),  s = c t,
///   F(xi)   = (C - kappa xi^2)_+^{1/(alpha-1)},  kappa = (alpha-1)/(2 alpha (alpha+1)).
///
/// C is fixed by the total mass.
struct BarenblattParams {
  double alpha;
  double mass;
  double kappa;
  double c_const;
  double pme_coeff;

  /// Half-width of the support at time t: sqrt(C/kappa) s^{1/(alpha+1)}.
  double support_radius(double t) const;
  /// Peak value U(t, 0) = s^{-1/(alpha+1)} C^{1/(alpha-1)}.
  double peak(double t) const;
  /// Speed of the right interface, d/dt support_radius(t).
  double edge_speed(double t) const;
};

/// Mass of the profile F for a given C (adaptive Gauss-Kronrod quadrature).
double barenblatt_profile_mass(double alpha, double c_const);

/// Finds C by bisection on the increasing map C -> mass(C) over [1e-8, 1e8].
BarenblattParams barenblatt_params(double alpha, double mass, double pme_coeff);

/// Rejects t <= 0.
double barenblatt_eval(const BarenblattParams& p, double t, double x);

/// Point values at the cell centers.
Field barenblatt_field(const BarenblattParams& p, const Grid& grid, double t);

}  // namespace hicomp
