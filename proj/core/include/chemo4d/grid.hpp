#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace chemo4d {

/// Uniform 1-D mesh on [0, R] carrying the radial measure of R^4.
///
/// weights[] are quadrature weights for the density integral
///   int_0^R f(r) r^3 dr  ~=  sum_i weights[i] * f(r_i),
/// a trapezoid rule against r^3 whose end weights are corrected so the rule
/// is exact for constant f; for smooth f decaying before R it is O(h^4)
/// accurate. face_conductance[] holds the flux coefficients of the discrete
/// radial Laplacian, tuned so the flux form divided by these weights is
/// exact on r^2 at every interior row (plain r^3 faces have an O(1) defect
/// at the first node off the origin).
class RadialGrid {
 public:
  RadialGrid(double R, std::size_t n);

  double R() const { return R_; }
  std::size_t n() const { return n_; }
  double h() const { return h_; }

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  /// r^3 at face i+1/2, i = 0 .. n-2.
  const std::vector<double>& face_r3() const { return face_r3_; }
  /// Flux coefficients of the discrete Laplacian at faces, ~ r^3 + O(h^2 r).
  const std::vector<double>& face_conductance() const { return face_cond_; }

  double node(std::size_t i) const { return nodes_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  /// sum_i weights[i] * f[i], fixed left-to-right order.
  double integrate_r3(const std::vector<double>& values) const;

  bool same_as(const RadialGrid& other) const {
    return this == &other || (R_ == other.R_ && n_ == other.n_);
  }

 private:
  double R_;
  std::size_t n_;
  double h_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> face_r3_;
  std::vector<double> face_cond_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr build_grid(double R, std::size_t n);

}  // namespace chemo4d
