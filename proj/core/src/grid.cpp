#include "chemo4d/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace chemo4d {

RadialGrid::RadialGrid(double R, std::size_t n) : R_(R), n_(n) {
  if (!std::isfinite(R) || R <= 0.0) {
    throw std::invalid_argument("RadialGrid: R must be finite and positive");
  }
  if (n < 16) {
    throw std::invalid_argument("RadialGrid: need at least 16 nodes");
  }
  h_ = R / static_cast<double>(n - 1);

  nodes_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes_[i] = static_cast<double>(i) * h_;
  }
  nodes_.front() = 0.0;
  nodes_.back() = R;

  face_r3_.resize(n - 1);
  face_cond_.resize(n - 1);
  const double h3 = h_ * h_ * h_;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double x = static_cast<double>(i) + 0.5;  // face radius in units of h
    face_r3_[i] = x * x * x * h3;
    // conductances solving gamma_i (2i+1) - gamma_{i-1} (2i-1) = 8 i^3, the
    // condition for the flux-form Laplacian with trapezoid cell measures to
    // be exact on r^2 at every row; all positive
    face_cond_[i] = (x * x * x - 0.5 * x + 0.375 / (2.0 * x)) * h3;
  }

  weights_.resize(n);
  weights_[0] = h_ * face_cond_[0] / 8.0;  // = h^4/32; row 0 gives 4 f''(0)
  for (std::size_t i = 1; i + 1 < n; ++i) {
    weights_[i] = h_ * nodes_[i] * nodes_[i] * nodes_[i];
  }
  // remainder of R^4/4, which makes the rule exact for constants; the bulk
  // is the plain trapezoid weight h R^3/2 and the rest absorbs the
  // Euler-Maclaurin boundary term of the r^3 density
  double partial = weights_[0];
  for (std::size_t i = 1; i + 1 < n; ++i) partial += weights_[i];
  weights_[n - 1] = R * R * R * R / 4.0 - partial;

  for (double w : weights_) {
    if (!(w >= 0.0)) {
      throw std::logic_error("RadialGrid: nonpositive quadrature weight");
    }
  }
}

double RadialGrid::integrate_r3(const std::vector<double>& values) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < n_; ++i) acc += weights_[i] * values[i];
  return acc;
}

GridPtr build_grid(double R, std::size_t n) {
  return std::make_shared<const RadialGrid>(R, n);
}

}  // namespace chemo4d
