#pragma once

#include <array>
#include <string>
#include <vector>

#include "chemo4d/field.hpp"
#include "chemo4d/params.hpp"
#include "chemo4d/series.hpp"
#include "chemo4d/state.hpp"

namespace chemo4d {

/// Optimal constant in || f ||_{4/3} <= C_S || grad f ||_1 on R^4.
double sobolev_constant();
/// Optimal constant in the Hardy-Littlewood-Sobolev form with kernel |x-y|^-2.
double hls_constant();
/// C_HLS * C_S^2 / (4 pi^2); equals sqrt(3)/(8 pi)^2.
double chained_constant();

/// Outcome of one inequality evaluation. passed <=> margin >= -slack.
struct InequalityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
  double slack = 0.0;
  bool passed = false;
  std::string witness;
};

double default_slack(double lhs, double rhs);

InequalityReport make_report(std::string name, double lhs, double rhs,
                             std::string witness, double slack = -1.0);

/// Radial W^{k,p} proxy: order 0 is ||f||_p, order 1 adds ||f'||_p, order 2
/// adds the two radial Hessian components ||Lap f||_p and ||f'/r||_p.
double sobolev_norm(const Field& f, int order, double p);

/// int (1+u) log(1+u) dx, nonnegative for u >= 0.
double modified_entropy(const Field& u);

/// E(v; f) = d1 d2/2 ||Lap v||^2 + (d1 l2 + d2 l1)/2 ||grad v||^2
///           + l1 l2/2 ||v||^2 - int f v dx,
/// with the self-adjoint discrete operators, so the minimizer identities hold
/// to roundoff.
double chemical_energy(const Field& v, const Field& f, const Params& params);

struct MinimizationGap {
  double gap;             // E(v; u) - E(v_u; u)
  double quadratic_form;  // same quadratic form evaluated on v - v_u
};
MinimizationGap minimization_gap(const Field& v, const Field& u,
                                 const Params& params);

/// F(u, v) = modified entropy + 0.5 ||vt||_2^2 + E(v; u).
double lyapunov_F(const State& state, const Params& params);

/// D(u, v) = int u |grad(log(1+u) - v)|^2 + int |grad(log(1+u) - v/2)|^2
///           + (d1+d2) ||grad vt||^2 + (l1+l2) ||vt||^2.
double dissipation_D(const State& state, const Params& params);

/// Residual of the Lyapunov identity
///   F(t) + int_0^t D ds = F(0) + 1/4 int_0^t ||grad v||_2^2 ds
/// per record, trapezoid in time, normalized by max(1, |F(0)|).
std::vector<double> lyapunov_identity_residual(const TimeSeries& series);

/// L(u, v, w) = entropy + E0(v)/(2 d1) + ||w||^2/(2 d1)
///              + (l2/(d1 d2)) ||grad W||^2,  W = (-Lap)^{-1} w.
double energy_L(const State& state, const Params& params);

/// D1 = D0 + ||grad Wt||^2/(d1 d2) + (l2/d1) ||w||^2
///      + (l2^2/(d1 d2)) ||grad W||^2, with Wt = (-Lap)^{-1}(dt w) and
///      dt w from the w-equation.
double dissipation_D1(const State& state, const Params& params);

/// int |grad f|^2 / (1 + f) dx at faces (arithmetic-mean denominator).
double grad_sq_over_one_plus(const Field& f);

struct BrezisMerleResult {
  double integral;   // int (e^{v_f} - 1) dx
  double bound_rhs;  // shape of the exponential-integrability bound, C = 1
};
/// Requires lambda1, lambda2 > 0 and ||f||_1 < 32 pi^2 d1 d2.
BrezisMerleResult brezis_merle_integral(const Field& f, const Params& params);

/// The three explicit sub-inequalities behind the L^p interpolation bound,
/// with phi_N(r) = 0 on [0,N], 2(r-N) on [N,2N], r beyond.
std::array<InequalityReport, 3> truncation_subinequalities(const Field& f,
                                                           double N);

/// ||f||_{4/3}^2 <= C_S^2 (1+eps)^2 ||f||_1 int |grad f|^2/(1+f)
///                + (sqrt(1+eps)/eps) (4/3)^{3/2} ||f||_1^{3/2}.
InequalityReport modified_sobolev_check(const Field& f, double eps);

/// int f (-Lap)^{-1} f dx <= (C_HLS / 4 pi^2) ||f||_{4/3}^2.
InequalityReport hls_check(const Field& f);

/// ||f||_{4/3} <= C_S ||grad f||_1.
InequalityReport sobolev_check(const Field& f);

struct BoundLFit {
  double C1_hat = 0.0;
  double C2_hat = 0.0;
  double violation_fraction = 1.0;
  bool conforming = false;
};
/// Largest C1 (log grid) admitting a bounded C2 such that
///   dL/dt + C1 (L + D1) <= C2
/// holds at >= 99% of records; C2 minimized at that C1.
BoundLFit bound_L_inequality_fit(const TimeSeries& series);

/// Assemble every tracked functional for one state.
Diagnostics compute_diagnostics(const State& state, const Params& params);

}  // namespace chemo4d
