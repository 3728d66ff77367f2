#include "chemo4d/elliptic.hpp"

#include <lapacke.h>

#include <cmath>
#include <stdexcept>

#include "chemo4d/errors.hpp"

namespace chemo4d {

Field apply_laplacian4(const Field& f) {
  const RadialGrid& g = f.grid();
  const std::size_t n = g.n();
  const double h = g.h();
  const double h2 = h * h;
  std::vector<double> out(n);

  // three-point stencils exact on {1, r^2, r^4}; near the origin this keeps
  // the (3/r) f' part from amplifying the truncation error
  out[0] = (32.0 * f[1] - 2.0 * f[2] - 30.0 * f[0]) / (3.0 * h2);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double ii = static_cast<double>(i);
    const double denom = 4.0 * ii * ii - 1.0;
    const double sum = (8.0 * ii * ii - 16.0) / denom;            // lo + up
    const double dif = (24.0 * ii * ii + 8.0) / (2.0 * ii * denom);  // up - lo
    const double lo = 0.5 * (sum - dif) / h2;
    const double up = 0.5 * (sum + dif) / h2;
    out[i] = lo * f[i - 1] - (lo + up) * f[i] + up * f[i + 1];
  }
  out[n - 1] = 2.0 * (f[n - 2] - f[n - 1]) / h2;
  return Field(f.grid_ptr(), std::move(out));
}

Field apply_laplacian4_conservative(const Field& f) {
  const RadialGrid& g = f.grid();
  const std::size_t n = g.n();
  const double h = g.h();
  const auto& fc = g.face_conductance();
  const auto& qw = g.weights();
  std::vector<double> out(n);

  // (Lf)_i = [flux_{i+1/2} - flux_{i-1/2}] / (h * m_i) with m_i = qw_i / h
  // and flux through face i+1/2 = conductance * (f_{i+1} - f_i)/h; zero flux
  // at both ends.
  double flux_lo = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double flux_hi = (i + 1 < n) ? fc[i] * (f[i + 1] - f[i]) / h : 0.0;
    out[i] = (flux_hi - flux_lo) / qw[i];
    flux_lo = flux_hi;
  }
  return Field(f.grid_ptr(), std::move(out));
}

double gradient_energy(const Field& f) {
  const RadialGrid& g = f.grid();
  const double h = g.h();
  const auto& fc = g.face_conductance();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < g.n(); ++i) {
    const double df = f[i + 1] - f[i];
    acc += fc[i] * df * df;
  }
  return kSphereArea3 * acc / h;
}

Field radial_derivative(const Field& f) {
  const std::size_t n = f.size();
  const double h = f.grid().h();
  std::vector<double> out(n);
  out[0] = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  }
  out[n - 1] = (f[n - 1] - f[n - 2]) / h;
  return Field(f.grid_ptr(), std::move(out));
}

namespace {

// Tridiagonal matrix alpha*I - beta*L with L the conservative Laplacian,
// plus an optional Dirichlet last row. LAPACK gttrf/gttrs backed.
struct Tridiag {
  lapack_int n = 0;
  std::vector<double> dl, dd, du;          // assembled bands
  std::vector<double> fl, fd, fu, fu2;     // factorization
  std::vector<lapack_int> ipiv;
  bool dirichlet_last = false;

  void assemble(const RadialGrid& g, double alpha, double beta,
                bool dirichlet_row) {
    n = static_cast<lapack_int>(g.n());
    dirichlet_last = dirichlet_row;
    const double h2 = g.h() * g.h();
    const auto& fc = g.face_conductance();
    const auto& qw = g.weights();
    const double hq = g.h();  // m_i = qw_i / h

    dl.assign(n - 1, 0.0);
    dd.assign(n, 0.0);
    du.assign(n - 1, 0.0);

    for (lapack_int i = 0; i < n; ++i) {
      const double m = qw[i] / hq;
      const double glo = (i > 0) ? fc[i - 1] : 0.0;
      const double ghi = (i + 1 < n) ? fc[i] : 0.0;
      if (i > 0) dl[i - 1] = -beta * glo / (h2 * m);
      dd[i] = alpha + beta * (glo + ghi) / (h2 * m);
      if (i + 1 < n) du[i] = -beta * ghi / (h2 * m);
    }
    if (dirichlet_row) {
      dl[n - 2] = 0.0;
      dd[n - 1] = 1.0;
    }
  }

  void factorize() {
    fl = dl;
    fd = dd;
    fu = du;
    fu2.assign(std::max<lapack_int>(n - 2, 0), 0.0);
    ipiv.assign(n, 0);
    const lapack_int info = LAPACKE_dgttrf(n, fl.data(), fd.data(), fu.data(),
                                           fu2.data(), ipiv.data());
    if (info != 0) {
      throw SingularSystemError("tridiagonal factorization failed (info " +
                                std::to_string(info) + ")");
    }
  }

  void solve_inplace(std::vector<double>& b) const {
    const lapack_int info =
        LAPACKE_dgttrs(LAPACK_COL_MAJOR, 'N', n, 1, fl.data(), fd.data(),
                       fu.data(), fu2.data(), ipiv.data(), b.data(), n);
    if (info != 0) {
      throw SingularSystemError("tridiagonal solve failed (info " +
                                std::to_string(info) + ")");
    }
  }

  std::vector<double> matvec(const std::vector<double>& x) const {
    std::vector<double> y(n);
    for (lapack_int i = 0; i < n; ++i) {
      double acc = dd[i] * x[i];
      if (i > 0) acc += dl[i - 1] * x[i - 1];
      if (i + 1 < n) acc += du[i] * x[i + 1];
      y[i] = acc;
    }
    return y;
  }
};

double far_field_value(const Field& rhs, double d) {
  // mass/(4 pi^2 R^2 d): the Poisson-kernel tail of a compactly supported
  // source, scaled by the diffusivity.
  const RadialGrid& g = rhs.grid();
  const double q_total = g.integrate_r3(rhs.values());
  return q_total / (2.0 * g.R() * g.R() * d);
}

}  // namespace

struct HelmholtzSolver::Impl {
  GridPtr grid;
  double d;
  double lambda;
  OuterClosure closure;
  bool far_field;
  Tridiag mat;
};

HelmholtzSolver::HelmholtzSolver(GridPtr grid, double d, double lambda,
                                 OuterClosure closure)
    : impl_(std::make_unique<Impl>()) {
  if (!(d > 0.0)) {
    throw std::invalid_argument("HelmholtzSolver: d must be positive");
  }
  if (!(lambda >= 0.0)) {
    throw std::invalid_argument("HelmholtzSolver: lambda must be >= 0");
  }
  bool far_field = false;
  switch (closure) {
    case OuterClosure::Auto:
      far_field = (lambda == 0.0);
      break;
    case OuterClosure::Neumann:
      if (lambda == 0.0) {
        throw SingularSystemError(
            "Helmholtz with lambda = 0 and zero-flux closure is singular; "
            "enable the far-field closure");
      }
      break;
    case OuterClosure::FarField:
      if (lambda != 0.0) {
        throw std::invalid_argument(
            "far-field closure applies to the lambda = 0 problem only");
      }
      far_field = true;
      break;
  }
  impl_->grid = std::move(grid);
  impl_->d = d;
  impl_->lambda = lambda;
  impl_->closure = closure;
  impl_->far_field = far_field;
  impl_->mat.assemble(*impl_->grid, lambda, d, far_field);
  impl_->mat.factorize();
}

HelmholtzSolver::~HelmholtzSolver() = default;
HelmholtzSolver::HelmholtzSolver(HelmholtzSolver&&) noexcept = default;
HelmholtzSolver& HelmholtzSolver::operator=(HelmholtzSolver&&) noexcept =
    default;

double HelmholtzSolver::d() const { return impl_->d; }
double HelmholtzSolver::lambda() const { return impl_->lambda; }

Field HelmholtzSolver::solve(const Field& rhs) const {
  if (!rhs.grid().same_as(*impl_->grid)) {
    throw std::invalid_argument("HelmholtzSolver: grid mismatch");
  }
  rhs.require_finite("helmholtz_solve");
  std::vector<double> b = rhs.values();
  if (impl_->far_field) b.back() = far_field_value(rhs, impl_->d);
  impl_->mat.solve_inplace(b);
  Field out(rhs.grid_ptr(), std::move(b));
  out.require_finite("helmholtz_solve");
  return out;
}

Field HelmholtzSolver::apply(const Field& f) const {
  if (!f.grid().same_as(*impl_->grid)) {
    throw std::invalid_argument("HelmholtzSolver: grid mismatch");
  }
  return Field(f.grid_ptr(), impl_->mat.matvec(f.values()));
}

Field helmholtz_solve(const Field& f, double d, double lambda,
                      OuterClosure closure) {
  HelmholtzSolver solver(f.grid_ptr(), d, lambda, closure);
  return solver.solve(f);
}

PoissonResult poisson_solve_signed(const Field& f) {
  f.require_finite("poisson_solve");
  const RadialGrid& g = f.grid();
  const std::size_t n = g.n();
  const double h = g.h();
  const double R = g.R();
  const auto& qw = g.weights();
  const auto& fc = g.face_conductance();

  // Q at face i+1/2 = int_0^{r_{i+1/2}} s^3 f ds by the grid quadrature.
  std::vector<double> q_face(n - 1);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    acc += qw[i] * f[i];
    q_face[i] = acc;
  }
  const double q_total = acc + qw[n - 1] * f[n - 1];

  std::vector<double> u(n);
  u[n - 1] = q_total / (2.0 * R * R);
  for (std::size_t i = n - 1; i-- > 0;) {
    u[i] = u[i + 1] + h * q_face[i] / fc[i];
  }

  // Face energy plus the exact kernel tail over r > R.
  double energy = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    energy += h * q_face[i] * q_face[i] / fc[i];
  }
  energy = kSphereArea3 * energy +
           0.5 * kSphereArea3 * q_total * q_total / (R * R);

  Field pot(f.grid_ptr(), std::move(u));
  pot.require_finite("poisson_solve");
  return {std::move(pot), energy};
}

Field poisson_solve(const Field& f) {
  const double floor = -tol_neg(f.max_abs());
  for (double v : f.values()) {
    if (v < floor) {
      throw std::domain_error("poisson_solve: source must be nonnegative");
    }
  }
  return poisson_solve_signed(f).potential;
}

Field biharmonic_factored_solve(const Field& f, const Params& params) {
  params.validate();
  const Field inner_v =
      helmholtz_solve(f, params.d2, params.lambda2, OuterClosure::Auto);
  return helmholtz_solve(inner_v, params.d1, params.lambda1,
                         OuterClosure::Auto);
}

Field heat_semigroup(const Field& f, double d, double lambda, double t,
                     std::size_t substeps) {
  if (!(t >= 0.0)) throw std::invalid_argument("heat_semigroup: t must be >= 0");
  if (substeps < 1) {
    throw std::invalid_argument("heat_semigroup: substeps must be >= 1");
  }
  if (t == 0.0) return f;
  f.require_finite("heat_semigroup");

  const RadialGrid& g = f.grid();
  const double dt = t / static_cast<double>(substeps);
  const double decay = std::exp(-lambda * dt);

  // Damped start: two backward Euler half-steps (same matrix as the CN
  // solve), then Crank-Nicolson.
  Tridiag cn_solve;
  cn_solve.assemble(g, 1.0, 0.5 * dt * d, false);
  cn_solve.factorize();
  Tridiag cn_apply;
  cn_apply.assemble(g, 1.0, -0.5 * dt * d, false);

  std::vector<double> x = f.values();
  cn_solve.solve_inplace(x);
  cn_solve.solve_inplace(x);
  for (double& v : x) v *= decay;
  for (std::size_t k = 1; k < substeps; ++k) {
    x = cn_apply.matvec(x);
    cn_solve.solve_inplace(x);
    for (double& v : x) v *= decay;
  }
  Field out(f.grid_ptr(), std::move(x));
  out.require_finite("heat_semigroup");
  return out;
}

}  // namespace chemo4d
