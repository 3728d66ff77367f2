#include "chemo4d/params.hpp"

#include <cmath>
#include <numbers>

namespace chemo4d {

void Params::validate() const {
  if (!(d1 > 0.0) || !(d2 > 0.0)) {
    throw std::invalid_argument("Params: diffusivities must be positive");
  }
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) {
    throw std::invalid_argument("Params: decay rates must be nonnegative");
  }
  if (!std::isfinite(d1) || !std::isfinite(d2) || !std::isfinite(lambda1) ||
      !std::isfinite(lambda2)) {
    throw std::invalid_argument("Params: coefficients must be finite");
  }
}

ThresholdConstants threshold_constants(const Params& p) {
  p.validate();
  const double pi = std::numbers::pi;
  const double eight_pi_sq = 64.0 * pi * pi;
  const double sqrt3 = std::sqrt(3.0);
  return {eight_pi_sq * p.d1 * p.d2, eight_pi_sq * p.d1 * p.d2 / sqrt3,
          sqrt3 / eight_pi_sq};
}

double tol_neg(double sup_abs) { return 1e-10 * sup_abs; }

}  // namespace chemo4d
