#include "chemo4d/picard.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "chemo4d/elliptic.hpp"
#include "chemo4d/errors.hpp"
#include "chemo4d/functionals.hpp"

namespace chemo4d {

double beta(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0)) {
    throw std::invalid_argument("beta: arguments must be positive");
  }
  return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
}

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) {
    throw QuadratureError("adaptive quadrature: depth exhausted");
  }
  if (std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double tol = rel_tol * std::max(std::abs(whole), 1e-300);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 60);
}

}  // namespace

double i_lambda_p(double lambda, double p, double t) {
  if (!(p >= 1.0) || !(p < 2.0)) {
    throw std::invalid_argument(
        "i_lambda_p: p must lie in [1, 2) for an integrable singularity");
  }
  if (!(lambda >= 0.0)) {
    throw std::invalid_argument("i_lambda_p: lambda must be >= 0");
  }
  if (!(t >= 0.0)) throw std::invalid_argument("i_lambda_p: t must be >= 0");
  if (t == 0.0) return 0.0;

  const double sigma = 2.0 * (1.0 - 1.0 / p);  // in [0, 1)
  // substitution s = tau^mu with mu = 1/(1-sigma) removes the endpoint
  // singularity: integrand becomes mu * exp(-lambda tau^mu)
  const double mu = 1.0 / (1.0 - sigma);
  const double upper = std::pow(t, 1.0 / mu);
  const std::function<double(double)> g = [lambda, mu](double tau) {
    return mu * std::exp(-lambda * std::pow(tau, mu));
  };
  const double value = integrate(g, 0.0, upper, 1e-9);

  if (lambda > 0.0) {
    const double a = 2.0 / p - 1.0;
    const double bound = std::tgamma(a) * std::pow(lambda, -a);
    if (value > bound * (1.0 + 1e-8)) {
      throw std::logic_error("i_lambda_p exceeded its Gamma bound");
    }
  }
  return value;
}

void WeightedTriple::validate_exponents() const {
  if (!(p > 2.0) || !(p < 4.0)) {
    throw std::invalid_argument("WeightedTriple: need 2 < p < 4");
  }
  const double lower = 4.0 * p / (p + 4.0);
  if (!(q > lower) || !(q < 2.0)) {
    throw std::invalid_argument("WeightedTriple: need 4p/(p+4) < q < 2");
  }
}

WeightedTriple zero_triple(const GridPtr& grid, double T, std::size_t m,
                           double p, double q) {
  if (!(T > 0.0)) throw std::invalid_argument("zero_triple: T must be > 0");
  if (m < 2) throw std::invalid_argument("zero_triple: mesh too coarse");
  WeightedTriple x;
  x.T = T;
  x.m = m;
  x.p = p;
  x.q = q;
  x.validate_exponents();
  x.times.resize(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    const double s = static_cast<double>(j) / static_cast<double>(m);
    x.times[j] = T * s * s;
  }
  x.u.assign(m + 1, Field(grid));
  x.v.assign(m + 1, Field(grid));
  x.w.assign(m + 1, Field(grid));
  return x;
}

std::size_t duhamel_substeps(double interval, double T, std::size_t m) {
  const double base = T / (4.0 * static_cast<double>(m));
  const double k = std::ceil(interval / base);
  return static_cast<std::size_t>(std::clamp(k, 1.0, 256.0));
}

namespace {

/// Node-valued radial divergence of the flux carried by psi, in the same
/// face form as the stepper, with zero end fluxes.
Field radial_divergence(const Field& psi) {
  const RadialGrid& g = psi.grid();
  const std::size_t n = g.n();
  const auto& fc = g.face_conductance();
  const auto& qw = g.weights();
  std::vector<double> out(n);
  double glo = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ghi = (i + 1 < n) ? fc[i] * 0.5 * (psi[i] + psi[i + 1]) : 0.0;
    out[i] = (ghi - glo) / qw[i];
    glo = ghi;
  }
  return Field(psi.grid_ptr(), std::move(out));
}

Field multiply(const Field& a, const Field& b) {
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i] * b[i];
  return Field(a.grid_ptr(), std::move(v));
}

}  // namespace

WeightedTriple phi_map(const WeightedTriple& input, const MildData& data,
                       const Params& params) {
  params.validate();
  input.validate_exponents();
  const std::size_t m = input.m;
  const GridPtr grid = data.u0.grid_ptr();
  WeightedTriple out = zero_triple(grid, input.T, m, input.p, input.q);

  // flux scalar carried by the u-component integrand: u dv/dr at nodes
  std::vector<Field> src_u;
  src_u.reserve(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    src_u.push_back(multiply(input.u[j], radial_derivative(input.v[j])));
  }

  Field ju(grid), iv(grid), iw(grid);  // running Duhamel integrals

  out.u[0] = data.u0;
  out.v[0] = data.v0;
  out.w[0] = data.w0;

  for (std::size_t j = 1; j <= m; ++j) {
    const double t_j = input.times[j];
    const double dt = t_j - input.times[j - 1];
    const std::size_t nsub = duhamel_substeps(dt, input.T, m);
    const double half = 0.5 * dt;

    // homogeneous parts directly from the data, so the vanishing-source
    // case reproduces heat_semigroup bit for bit
    const std::size_t nsub_h = duhamel_substeps(t_j, input.T, m);
    const Field hu = heat_semigroup(data.u0, 1.0, 0.0, t_j, nsub_h);
    const Field hv =
        heat_semigroup(data.v0, params.d1, params.lambda1, t_j, nsub_h);
    const Field hw =
        heat_semigroup(data.w0, params.d2, params.lambda2, t_j, nsub_h);

    ju = heat_semigroup(ju + half * src_u[j - 1], 1.0, 0.0, dt, nsub) +
         half * src_u[j];
    iv = heat_semigroup(iv + half * input.w[j - 1], params.d1, params.lambda1,
                        dt, nsub) +
         half * input.w[j];
    iw = heat_semigroup(iw + half * input.u[j - 1], params.d2, params.lambda2,
                        dt, nsub) +
         half * input.u[j];

    out.u[j] = hu - radial_divergence(ju);
    out.v[j] = hv + iv;
    out.w[j] = hw + iw;
    if (!out.u[j].all_finite() || !out.v[j].all_finite() ||
        !out.w[j].all_finite()) {
      throw QuadratureError("phi_map: non-finite Duhamel quadrature");
    }
  }
  return out;
}

XtNorms xt_norms(const WeightedTriple& triple) {
  triple.validate_exponents();
  XtNorms n;
  const double ev = 1.0 - 2.0 / triple.p;
  const double ew = 1.5 - 2.0 / triple.q;
  for (std::size_t j = 1; j <= triple.m; ++j) {
    const double t = triple.times[j];
    n.Nu = std::max(n.Nu,
                    std::sqrt(t) * lp_norm(triple.u[j], 4.0 / 3.0));
    n.Nv = std::max(n.Nv, std::pow(t, ev) *
                              sobolev_norm(triple.v[j], 2, triple.p));
    n.Nw = std::max(n.Nw, std::pow(t, ew) *
                              sobolev_norm(triple.w[j], 1, triple.q));
  }
  return n;
}

double triple_distance(const WeightedTriple& a, const WeightedTriple& b) {
  if (a.m != b.m || a.T != b.T) {
    throw std::invalid_argument("triple_distance: mesh mismatch");
  }
  WeightedTriple diff = a;
  for (std::size_t j = 0; j <= a.m; ++j) {
    diff.u[j] = a.u[j] - b.u[j];
    diff.v[j] = a.v[j] - b.v[j];
    diff.w[j] = a.w[j] - b.w[j];
  }
  return xt_norms(diff).total();
}

PicardResult picard_iterate(const MildData& data, const Params& params,
                            double T, std::size_t k_max, double tol,
                            std::size_t mesh_m) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument("picard_iterate: tol must be > 0");
  }
  PicardResult res;
  WeightedTriple prev = zero_triple(data.u0.grid_ptr(), T, mesh_m);
  double prev_dist = -1.0;
  std::size_t bad_streak = 0;

  for (std::size_t k = 1; k <= k_max; ++k) {
    WeightedTriple next = phi_map(prev, data, params);
    const double dist = triple_distance(next, prev);
    res.iterations = k;
    if (prev_dist > 0.0) {
      const double ratio = dist / prev_dist;
      res.ratios.push_back(ratio);
      bad_streak = ratio >= 1.0 ? bad_streak + 1 : 0;
      if (bad_streak >= 3) {
        throw NonContractionError(
            "picard_iterate: no contraction for 3 consecutive iterations");
      }
    }
    prev = std::move(next);
    if (dist <= tol) {
      res.converged = true;
      break;
    }
    prev_dist = dist;
  }
  res.fixed_point = std::move(prev);
  return res;
}

}  // namespace chemo4d
