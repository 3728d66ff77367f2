#pragma once

#include <limits>
#include <vector>

#include "chemo4d/grid.hpp"

namespace chemo4d {

/// Surface area of the unit 3-sphere; every integral over R^4 of a radial
/// function is 2*pi^2 * int_0^inf f(r) r^3 dr.
inline constexpr double kSphereArea3 = 19.739208802178716;  // 2*pi^2

/// A radially symmetric function on R^4, sampled on a RadialGrid.
/// Immutable by convention: operations return new Fields.
class Field {
 public:
  Field(GridPtr grid, std::vector<double> values);
  /// Zero field.
  explicit Field(GridPtr grid);

  const RadialGrid& grid() const { return *grid_; }
  GridPtr grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  double min() const;
  double max() const;
  double max_abs() const;
  bool all_finite() const;

  /// Throws if any value is non-finite.
  void require_finite(const char* what) const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double s, const Field& a);

/// ||f||_p with the radial measure of R^4; p = infinity gives max |f|.
double lp_norm(const Field& f, double p);
inline constexpr double kInfExponent = std::numeric_limits<double>::infinity();

/// int_{R^4} f dx for nonnegative f (equals lp_norm(f, 1)).
double mass(const Field& f);

/// Signed integral int_{R^4} f dx, no sign restriction.
double integral(const Field& f);

/// <f, g> = int f g dx under the radial measure.
double inner(const Field& f, const Field& g);

/// A * exp(-r^2/width^2) with A chosen so the grid mass equals mass_target.
Field gaussian_bump(double width, double mass_target, const GridPtr& grid);

/// Off-center radial shell A * exp(-(r-center)^2/width^2), grid-normalized.
Field gaussian_shell(double center, double width, double mass_target,
                     const GridPtr& grid);

}  // namespace chemo4d
