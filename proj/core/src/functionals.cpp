#include "chemo4d/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "chemo4d/elliptic.hpp"

namespace chemo4d {

namespace {

constexpr double kPi = std::numbers::pi;

void require_nonneg(const Field& f, const char* what) {
  const double floor = -tol_neg(f.max_abs());
  for (double v : f.values()) {
    if (v < floor) {
      throw std::domain_error(std::string(what) +
                              ": field must be nonnegative");
    }
  }
}

/// Logarithmic mean of positive a, b; the face value that makes the discrete
/// entropy production match the flux-form scheme exactly.
double log_mean(double a, double b) {
  const double zeta = (b - a) / (b + a);
  const double z2 = zeta * zeta;
  if (z2 < 1e-8) {
    return 0.5 * (a + b) / (1.0 + z2 / 3.0 + z2 * z2 / 5.0);
  }
  return (b - a) / std::log(b / a);
}

/// 2 pi^2 h sum over faces of conductance * c_f * q_f^2; the same face
/// family as the operator, so completed squares cancel exactly.
double face_energy(const RadialGrid& g, const std::vector<double>& q,
                   const std::vector<double>* coeff) {
  const auto& fc = g.face_conductance();
  double acc = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double c = coeff ? (*coeff)[i] : 1.0;
    acc += fc[i] * c * q[i] * q[i];
  }
  return kSphereArea3 * g.h() * acc;
}

double l2_sq(const Field& f) { return inner(f, f); }

}  // namespace

double sobolev_constant() {
  return std::pow(2.0, 0.25) / (4.0 * std::sqrt(kPi));
}

double hls_constant() { return std::sqrt(1.5) * kPi; }

double chained_constant() {
  const double cs = sobolev_constant();
  return hls_constant() * cs * cs / (4.0 * kPi * kPi);
}

double default_slack(double lhs, double rhs) {
  return 1e-8 * (std::abs(lhs) + std::abs(rhs) + 1.0);
}

InequalityReport make_report(std::string name, double lhs, double rhs,
                             std::string witness, double slack) {
  InequalityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.slack = slack < 0.0 ? default_slack(lhs, rhs) : slack;
  r.passed = r.margin >= -r.slack;
  r.witness = std::move(witness);
  return r;
}

double sobolev_norm(const Field& f, int order, double p) {
  if (order < 0 || order > 2) {
    throw std::invalid_argument("sobolev_norm: order must be 0, 1 or 2");
  }
  double norm = lp_norm(f, p);
  if (order >= 1) {
    norm += lp_norm(radial_derivative(f), p);
  }
  if (order == 2) {
    norm += lp_norm(apply_laplacian4(f), p);
    // second radial Hessian component f'/r, with the r = 0 limit f''(0)
    const Field df = radial_derivative(f);
    const RadialGrid& g = f.grid();
    std::vector<double> v(f.size());
    const double h = g.h();
    v[0] = 2.0 * (f[1] - f[0]) / (h * h);
    for (std::size_t i = 1; i < f.size(); ++i) v[i] = df[i] / g.node(i);
    norm += lp_norm(Field(f.grid_ptr(), std::move(v)), p);
  }
  return norm;
}

double modified_entropy(const Field& u) {
  require_nonneg(u, "modified_entropy");
  const auto& w = u.grid().weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = std::max(u[i], 0.0);
    acc += w[i] * (1.0 + x) * std::log1p(x);
  }
  return kSphereArea3 * acc;
}

double chemical_energy(const Field& v, const Field& f, const Params& params) {
  params.validate();
  const Field lap_v = apply_laplacian4_conservative(v);
  return 0.5 * params.d1 * params.d2 * l2_sq(lap_v) +
         0.5 * (params.d1 * params.lambda2 + params.d2 * params.lambda1) *
             gradient_energy(v) +
         0.5 * params.lambda1 * params.lambda2 * l2_sq(v) - inner(f, v);
}

MinimizationGap minimization_gap(const Field& v, const Field& u,
                                 const Params& params) {
  require_nonneg(u, "minimization_gap");
  const Field v_u = biharmonic_factored_solve(u, params);
  const double gap = chemical_energy(v, u, params) -
                     chemical_energy(v_u, u, params);
  const Field delta = v - v_u;
  const Field lap_d = apply_laplacian4_conservative(delta);
  const double qf =
      0.5 * params.d1 * params.d2 * l2_sq(lap_d) +
      0.5 * (params.d1 * params.lambda2 + params.d2 * params.lambda1) *
          gradient_energy(delta) +
      0.5 * params.lambda1 * params.lambda2 * l2_sq(delta);
  return {gap, qf};
}

double lyapunov_F(const State& state, const Params& params) {
  return modified_entropy(state.u) + 0.5 * l2_sq(state.vt) +
         chemical_energy(state.v, state.u, params);
}

double dissipation_D(const State& state, const Params& params) {
  params.validate();
  require_nonneg(state.u, "dissipation_D");
  const Field& u = state.u;
  const RadialGrid& g = u.grid();
  const std::size_t nf = g.n() - 1;
  const double h = g.h();

  std::vector<double> a(nf), u_face(nf), amb(nf), ambhalf(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    const double x = 1.0 + std::max(u[i], 0.0);
    const double y = 1.0 + std::max(u[i + 1], 0.0);
    a[i] = (std::log(y) - std::log(x)) / h;
    u_face[i] = log_mean(x, y) - 1.0;
    const double b = (state.v[i + 1] - state.v[i]) / h;
    amb[i] = a[i] - b;
    ambhalf[i] = a[i] - 0.5 * b;
  }
  const double term1 = face_energy(g, amb, &u_face);
  const double term2 = face_energy(g, ambhalf, nullptr);
  const double term3 =
      (params.d1 + params.d2) * gradient_energy(state.vt);
  const double term4 = (params.lambda1 + params.lambda2) * l2_sq(state.vt);
  return term1 + term2 + term3 + term4;
}

std::vector<double> lyapunov_identity_residual(const TimeSeries& series) {
  const auto& rec = series.records;
  if (rec.size() < 3) {
    throw std::invalid_argument(
        "lyapunov_identity_residual: need at least 3 records");
  }
  const double f0 = rec.front().diag.F_lyap;
  const double scale = std::max(1.0, std::abs(f0));
  std::vector<double> out(rec.size());
  out[0] = 0.0;
  double int_d = 0.0;
  double int_g = 0.0;
  for (std::size_t k = 1; k < rec.size(); ++k) {
    const double dt = rec[k].t - rec[k - 1].t;
    int_d += 0.5 * dt * (rec[k].diag.D_diss + rec[k - 1].diag.D_diss);
    int_g += 0.5 * dt * (rec[k].diag.grad_v_sq + rec[k - 1].diag.grad_v_sq);
    out[k] = (rec[k].diag.F_lyap + int_d - f0 - 0.25 * int_g) / scale;
  }
  return out;
}

namespace {

double e0_energy(const State& state, const Params& p) {
  const Field lap_v = apply_laplacian4_conservative(state.v);
  return l2_sq(state.vt) + p.d1 * p.d2 * l2_sq(lap_v) +
         (p.d1 * p.lambda2 + p.d2 * p.lambda1) * gradient_energy(state.v) +
         p.lambda1 * p.lambda2 * l2_sq(state.v);
}

Field w_equation_rhs(const State& state, const Params& p) {
  // dt w = d2 Lap w - lambda2 w + u
  Field lw = apply_laplacian4_conservative(state.w);
  std::vector<double> v(state.w.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = p.d2 * lw[i] - p.lambda2 * state.w[i] + state.u[i];
  }
  return Field(state.w.grid_ptr(), std::move(v));
}

}  // namespace

double energy_L(const State& state, const Params& params) {
  params.validate();
  require_nonneg(state.w, "energy_L");
  double value = modified_entropy(state.u) +
                 e0_energy(state, params) / (2.0 * params.d1) +
                 l2_sq(state.w) / (2.0 * params.d1);
  if (params.lambda2 > 0.0) {
    const PoissonResult W = poisson_solve_signed(state.w);
    value += params.lambda2 / (params.d1 * params.d2) * W.grad_energy_sq;
  }
  return value;
}

double dissipation_D1(const State& state, const Params& params) {
  params.validate();
  require_nonneg(state.u, "dissipation_D1");
  require_nonneg(state.w, "dissipation_D1");
  const double d0 =
      grad_sq_over_one_plus(state.u) +
      (params.lambda1 + params.lambda2) / params.d1 * l2_sq(state.vt) +
      (params.d1 + params.d2) / params.d1 * gradient_energy(state.vt);
  const PoissonResult Wt = poisson_solve_signed(w_equation_rhs(state, params));
  double value = d0 + Wt.grad_energy_sq / (params.d1 * params.d2) +
                 params.lambda2 / params.d1 * l2_sq(state.w);
  if (params.lambda2 > 0.0) {
    const PoissonResult W = poisson_solve_signed(state.w);
    value += params.lambda2 * params.lambda2 / (params.d1 * params.d2) *
             W.grad_energy_sq;
  }
  return value;
}

double grad_sq_over_one_plus(const Field& f) {
  require_nonneg(f, "grad_sq_over_one_plus");
  const RadialGrid& g = f.grid();
  const double h = g.h();
  const auto& fc = g.face_conductance();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    const double df = (f[i + 1] - f[i]) / h;
    const double denom = 1.0 + 0.5 * (std::max(f[i], 0.0) +
                                      std::max(f[i + 1], 0.0));
    acc += fc[i] * df * df / denom;
  }
  return kSphereArea3 * h * acc;
}

BrezisMerleResult brezis_merle_integral(const Field& f, const Params& params) {
  params.validate();
  if (!params.decay_positive()) {
    throw std::invalid_argument(
        "brezis_merle_integral: requires lambda1 > 0 and lambda2 > 0");
  }
  const double m = mass(f);
  const double threshold = 32.0 * kPi * kPi * params.d1 * params.d2;
  if (!(m < threshold)) {
    throw std::domain_error(
        "brezis_merle_integral: mass must be below 32 pi^2 d1 d2");
  }
  const Field vf = biharmonic_factored_solve(f, params);
  const auto& w = f.grid().weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < vf.size(); ++i) {
    acc += w[i] * std::expm1(vf[i]);
  }
  const double integral = kSphereArea3 * acc;

  const double gamma = 1.0 / (8.0 * kPi * kPi * params.d1 * params.d2);
  const double kappa =
      std::min(params.lambda1 / params.d1, params.lambda2 / params.d2);
  const double bound = std::exp(2.0 * gamma * m) / kappa *
                       (std::pow(2.0, gamma * m) / (threshold - m) + 1.0);
  return {integral, bound};
}

std::array<InequalityReport, 3> truncation_subinequalities(const Field& f,
                                                           double N) {
  if (!(N >= 1.0)) {
    throw std::invalid_argument("truncation_subinequalities: N must be >= 1");
  }
  require_nonneg(f, "truncation_subinequalities");
  const RadialGrid& g = f.grid();
  const std::size_t n = g.n();

  auto phi = [N](double s) {
    if (s <= N) return 0.0;
    if (s <= 2.0 * N) return 2.0 * (s - N);
    return s;
  };

  std::vector<double> sq(n), trunc(n);
  for (std::size_t i = 0; i < n; ++i) {
    sq[i] = std::sqrt(std::max(f[i], 0.0));
    trunc[i] = phi(sq[i]);
  }
  const Field phif(f.grid_ptr(), trunc);

  const double mass_f = mass(f);
  const std::string wit = "N=" + std::to_string(N);

  // (a) ||grad phi_N(sqrt f)||_2^2 <= 2 int |grad f|^2/(1+f)
  const double lhs_a = gradient_energy(phif);
  const double rhs_a = 2.0 * grad_sq_over_one_plus(f);

  // (b) ||phi_N(sqrt f)||_2^2 <= entropy / log(1+N^2)
  const double lhs_b = inner(phif, phif);
  const double rhs_b = modified_entropy(f) / std::log1p(N * N);

  // (c) ||phi_N(sqrt f) - sqrt f||_3^3 <= (4 N^2)^{1/2} ||f||_1 = 2N ||f||_1.
  // The difference is supported on {sqrt f <= 2N}, so the sharp prefactor is
  // sup f^{p-1} = (4N^2)^{p-1} over that set, p = 3/2.
  const auto& w = g.weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::abs(trunc[i] - sq[i]);
    acc += w[i] * d * d * d;
  }
  const double lhs_c = kSphereArea3 * acc;
  const double rhs_c = 2.0 * N * mass_f;

  return {make_report("truncation_gradient", lhs_a, rhs_a, wit),
          make_report("truncation_mass", lhs_b, rhs_b, wit),
          make_report("truncation_remainder", lhs_c, rhs_c, wit)};
}

InequalityReport modified_sobolev_check(const Field& f, double eps) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("modified_sobolev_check: eps must be > 0");
  }
  const double m = mass(f);
  const double l43 = lp_norm(f, 4.0 / 3.0);
  const double cs = sobolev_constant();
  const double lhs = l43 * l43;
  const double rhs = cs * cs * (1.0 + eps) * (1.0 + eps) * m *
                         grad_sq_over_one_plus(f) +
                     std::sqrt(1.0 + eps) / eps *
                         std::pow(4.0 / 3.0, 1.5) * std::pow(m, 1.5);
  return make_report("modified_sobolev", lhs, rhs,
                     "eps=" + std::to_string(eps));
}

InequalityReport hls_check(const Field& f) {
  const Field U = poisson_solve(f);
  const double lhs = inner(f, U);
  const double l43 = lp_norm(f, 4.0 / 3.0);
  const double rhs = hls_constant() / (4.0 * kPi * kPi) * l43 * l43;
  return make_report("hls", lhs, rhs, "");
}

InequalityReport sobolev_check(const Field& f) {
  f.require_finite("sobolev_check");
  const RadialGrid& g = f.grid();
  const auto& fr3 = g.face_r3();
  double tv = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    tv += fr3[i] * std::abs(f[i + 1] - f[i]);
  }
  tv *= kSphereArea3;
  const double lhs = lp_norm(f, 4.0 / 3.0);
  const double rhs = sobolev_constant() * tv;
  return make_report("sobolev", lhs, rhs, "");
}

BoundLFit bound_L_inequality_fit(const TimeSeries& series) {
  const auto& rec = series.records;
  if (rec.size() < 16) {
    throw std::invalid_argument(
        "bound_L_inequality_fit: need at least 16 records");
  }
  const std::size_t m = rec.size() - 1;
  std::vector<double> dl(m), s(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double dt = rec[j + 1].t - rec[j].t;
    dl[j] = (rec[j + 1].diag.L_energy - rec[j].diag.L_energy) / dt;
    s[j] = 0.5 * (rec[j].diag.L_energy + rec[j + 1].diag.L_energy) +
           0.5 * (rec[j].diag.D1_diss + rec[j + 1].diag.D1_diss);
  }

  auto p99 = [&](double c1) {
    std::vector<double> vals(m);
    for (std::size_t j = 0; j < m; ++j) vals[j] = dl[j] + c1 * s[j];
    const auto rank = static_cast<std::size_t>(
        std::ceil(0.99 * static_cast<double>(m)));
    const std::size_t k = std::min(m - 1, rank > 0 ? rank - 1 : 0);
    std::nth_element(vals.begin(), vals.begin() + k, vals.end());
    return vals[k];
  };
  auto violations = [&](double c1, double c2) {
    std::size_t bad = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (dl[j] + c1 * s[j] > c2 * (1.0 + 1e-12)) ++bad;
    }
    return static_cast<double>(bad) / static_cast<double>(m);
  };

  // the fitted pair must be informative: C2 may not exceed C1 times the
  // bulk of the observed L + D1, otherwise the inequality constrains
  // nothing and a runaway series would "fit" trivially
  double q95_s;
  {
    std::vector<double> tmp = s;
    const std::size_t k = std::min(m - 1, (m * 95) / 100);
    std::nth_element(tmp.begin(), tmp.begin() + k, tmp.end());
    q95_s = tmp[k];
  }

  BoundLFit best;
  const int nc1 = 49;
  for (int i = nc1 - 1; i >= 0; --i) {
    const double c1 =
        std::pow(10.0, -4.0 + 6.0 * static_cast<double>(i) / (nc1 - 1));
    const double c2 = std::max(p99(c1), 0.0);
    const double cap = c1 * q95_s;
    if (c2 <= cap * (1.0 + 1e-12)) {
      best.C1_hat = c1;
      best.C2_hat = c2;
      best.violation_fraction = violations(c1, c2);
      best.conforming = best.violation_fraction <= 0.01;
      return best;
    }
    // remember the least-violating capped pair in case nothing fits
    const double vf = violations(c1, cap);
    if (vf < best.violation_fraction) {
      best.C1_hat = c1;
      best.C2_hat = cap;
      best.violation_fraction = vf;
    }
  }
  return best;
}

Diagnostics compute_diagnostics(const State& state, const Params& params) {
  Diagnostics d;
  d.mass_u = mass(state.u);
  d.mass_w = mass(state.w);
  d.entropy = modified_entropy(state.u);
  d.E_chem = chemical_energy(state.v, state.u, params);
  d.vt_l2_sq = inner(state.vt, state.vt);
  d.F_lyap = d.entropy + 0.5 * d.vt_l2_sq + d.E_chem;
  d.D_diss = dissipation_D(state, params);
  d.L_energy = energy_L(state, params);
  d.D1_diss = dissipation_D1(state, params);
  d.sup_u = state.u.max_abs();
  d.lp43_u = lp_norm(state.u, 4.0 / 3.0);
  d.grad_v_sq = gradient_energy(state.v);
  return d;
}

}  // namespace chemo4d
