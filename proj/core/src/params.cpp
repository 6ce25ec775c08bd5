#include "hicomp/params.hpp"

#include <cmath>

#include "hicomp/error.hpp"

namespace hicomp {

PhysParams PhysParams::make(double alpha, double gamma, double epsilon,
                            std::optional<double> pme_coeff) {
  PhysParams p;
  p.alpha = alpha;
  p.gamma = gamma;
  p.epsilon = epsilon;
  p.pme_coeff = pme_coeff.value_or(1.0 / alpha);
  p.validate();
  return p;
}

void PhysParams::validate() const {
  if (!std::isfinite(alpha) || !(alpha > 1.0)) throw ValidationError("alpha must exceed 1");
  if (!std::isfinite(gamma) || !(gamma > 1.0)) throw ValidationError("gamma must exceed 1");
  if (!std::isfinite(epsilon) || !(epsilon >= 0.0)) {
    throw ValidationError("epsilon must be nonnegative");
  }
  if (!std::isfinite(pme_coeff) || !(pme_coeff > 0.0)) {
    throw ValidationError("pme_coeff must be positive");
  }
}

PhysParams PhysParams::with_epsilon(double eps) const {
  PhysParams p = *this;
  p.epsilon = eps;
  p.validate();
  return p;
}

}  // namespace hicomp
