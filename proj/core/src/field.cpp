#include "chemo4d/field.hpp"

#include "chemo4d/params.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace chemo4d {

Field::Field(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw std::invalid_argument("Field: null grid");
  if (values_.size() != grid_->n()) {
    throw std::invalid_argument("Field: value count does not match grid");
  }
}

Field::Field(GridPtr grid) : Field(grid, std::vector<double>(grid->n(), 0.0)) {}

double Field::min() const {
  return *std::min_element(values_.begin(), values_.end());
}

double Field::max() const {
  return *std::max_element(values_.begin(), values_.end());
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool Field::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void Field::require_finite(const char* what) const {
  if (!all_finite()) {
    throw std::domain_error(std::string(what) + ": non-finite field values");
  }
}

static void check_same_grid(const Field& a, const Field& b) {
  if (!a.grid().same_as(b.grid())) {
    throw std::invalid_argument("Field operation on mismatched grids");
  }
}

Field operator+(const Field& a, const Field& b) {
  check_same_grid(a, b);
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
  return Field(a.grid_ptr(), std::move(v));
}

Field operator-(const Field& a, const Field& b) {
  check_same_grid(a, b);
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] - b[i];
  return Field(a.grid_ptr(), std::move(v));
}

Field operator*(double s, const Field& a) {
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = s * a[i];
  return Field(a.grid_ptr(), std::move(v));
}

double lp_norm(const Field& f, double p) {
  f.require_finite("lp_norm");
  if (std::isinf(p)) return f.max_abs();
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  const auto& w = f.grid().weights();
  double acc = 0.0;
  if (p == 1.0) {
    for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * std::abs(f[i]);
  } else if (p == 2.0) {
    for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * f[i] * f[i];
  } else {
    for (std::size_t i = 0; i < f.size(); ++i) {
      acc += w[i] * std::pow(std::abs(f[i]), p);
    }
  }
  return std::pow(kSphereArea3 * acc, 1.0 / p);
}

double mass(const Field& f) {
  const double floor = -tol_neg(f.max_abs());
  for (double v : f.values()) {
    if (v < floor) {
      throw std::domain_error("mass: field has negative values beyond tol_neg");
    }
  }
  return lp_norm(f, 1.0);
}

double integral(const Field& f) {
  f.require_finite("integral");
  return kSphereArea3 * f.grid().integrate_r3(f.values());
}

double inner(const Field& f, const Field& g) {
  check_same_grid(f, g);
  const auto& w = f.grid().weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * f[i] * g[i];
  return kSphereArea3 * acc;
}

Field gaussian_shell(double center, double width, double mass_target,
                     const GridPtr& grid) {
  if (!(width > 0.0) || !std::isfinite(width)) {
    throw std::invalid_argument("gaussian bump: width must be positive");
  }
  if (!(mass_target >= 0.0) || !std::isfinite(mass_target)) {
    throw std::invalid_argument("gaussian bump: mass_target must be >= 0");
  }
  if (width < 8.0 * grid->h()) {
    throw std::invalid_argument(
        "gaussian bump: width under-resolved (width < 8h)");
  }
  const std::size_t n = grid->n();
  std::vector<double> v(n);
  if (mass_target == 0.0) return Field(grid, std::move(v));
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (grid->node(i) - center) / width;
    v[i] = std::exp(-d * d);
  }
  const double m = kSphereArea3 * grid->integrate_r3(v);
  if (!(m > 0.0)) {
    throw std::domain_error("gaussian bump: degenerate profile");
  }
  const double amp = mass_target / m;
  for (double& x : v) x *= amp;
  return Field(grid, std::move(v));
}

Field gaussian_bump(double width, double mass_target, const GridPtr& grid) {
  return gaussian_shell(0.0, width, mass_target, grid);
}

}  // namespace chemo4d
