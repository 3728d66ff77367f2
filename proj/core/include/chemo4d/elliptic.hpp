#pragma once

#include <memory>
#include <vector>

#include "chemo4d/field.hpp"
#include "chemo4d/params.hpp"

namespace chemo4d {

/// Pointwise radial Laplacian in R^4, Lap f = f'' + (3/r) f', by central
/// differences; at r = 0 the regular limit 4 f''(0), Neumann reflection at R.
/// Exact for quadratics at interior nodes.
Field apply_laplacian4(const Field& f);

/// Flux-form radial Laplacian (1/r^3) d/dr (r^3 df/dr) with zero flux at both
/// ends. Exactly self-adjoint in the grid inner product; this is the operator
/// every solver in this module inverts.
Field apply_laplacian4_conservative(const Field& f);

/// ||grad f||_2^2 evaluated at faces; equals -<f, L f> for the conservative L
/// to roundoff.
double gradient_energy(const Field& f);

/// Pointwise radial derivative at nodes: central interior, 0 at the origin,
/// one-sided at R.
Field radial_derivative(const Field& f);

enum class OuterClosure {
  Auto,      ///< Neumann for lambda > 0, far-field Dirichlet for lambda = 0
  Neumann,   ///< zero flux at R
  FarField,  ///< Dirichlet mass/(4 pi^2 R^2 d) at R (lambda = 0 only)
};

/// Factored tridiagonal representation of (-d Lap + lambda) on the grid.
/// Immutable after construction; solves allocate their own workspace.
class HelmholtzSolver {
 public:
  HelmholtzSolver(GridPtr grid, double d, double lambda,
                  OuterClosure closure = OuterClosure::Auto);
  ~HelmholtzSolver();
  HelmholtzSolver(HelmholtzSolver&&) noexcept;
  HelmholtzSolver& operator=(HelmholtzSolver&&) noexcept;

  /// Solve (-d Lap + lambda) v = rhs. With the far-field closure the value at
  /// R comes from the Poisson-kernel tail of rhs.
  Field solve(const Field& rhs) const;

  /// Apply the forward operator (same matrix the solve inverts).
  Field apply(const Field& f) const;

  double d() const;
  double lambda() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Field helmholtz_solve(const Field& f, double d, double lambda,
                      OuterClosure closure = OuterClosure::Auto);

/// Potential U = (-Lap)^{-1} f by the radial representation
///   U'(r) = -r^{-3} int_0^r s^3 f(s) ds,
/// closed with the exact kernel far field U(R) = mass/(4 pi^2 R^2) and
/// integrated inward. grad_energy_sq includes the exact r > R kernel tail,
/// so ||grad U||_2^2 = int f U dx holds to roundoff.
struct PoissonResult {
  Field potential;
  double grad_energy_sq;
};

/// No sign restriction on f (used for time-derivative sources).
PoissonResult poisson_solve_signed(const Field& f);

/// U = (-Lap)^{-1} f for f >= 0 (up to tol_neg).
Field poisson_solve(const Field& f);

/// v_f with (-d1 Lap + lambda1)(-d2 Lap + lambda2) v_f = f, inner factor
/// first. Zero decay rates fall back to the far-field closure.
Field biharmonic_factored_solve(const Field& f, const Params& params);

/// e^{t(d Lap - lambda)} f by Crank-Nicolson substeps with a damped
/// (backward Euler) start, each substep followed by the exact decay factor.
Field heat_semigroup(const Field& f, double d, double lambda, double t,
                     std::size_t substeps);

}  // namespace chemo4d
