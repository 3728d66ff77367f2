#pragma once

#include <stdexcept>

namespace chemo4d {

/// Coefficients of the three-component system: diffusivities d1, d2 for the
/// chemical and the intermediate species, decay rates lambda1, lambda2.
struct Params {
  double d1 = 1.0;
  double d2 = 1.0;
  double lambda1 = 1.0;
  double lambda2 = 1.0;

  void validate() const;
  bool decay_positive() const { return lambda1 > 0.0 && lambda2 > 0.0; }
};

/// Mass thresholds derived from the coefficients.
///   M_global  = (8*pi)^2 * d1 * d2        global-existence threshold
///   M_bounded = M_global / sqrt(3)        uniform-boundedness threshold
///   kappa_star = sqrt(3) / (8*pi)^2       sharp constant in the chained
///                                         HLS/Sobolev estimate
struct ThresholdConstants {
  double M_global;
  double M_bounded;
  double kappa_star;
};

ThresholdConstants threshold_constants(const Params& p);

/// Undershoot tolerance for fields that are nonnegative in exact arithmetic.
double tol_neg(double sup_abs);

}  // namespace chemo4d
