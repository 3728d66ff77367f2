#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chemo4d/elliptic.hpp"
#include "chemo4d/evolution.hpp"
#include "chemo4d/experiments.hpp"
#include "chemo4d/functionals.hpp"
#include "test_helpers.hpp"

using namespace chemo4d;
using namespace chemo4d::testing;

namespace {

constexpr double kPi = std::numbers::pi;
const Params kUnitParams{1.0, 1.0, 1.0, 1.0};

GridPtr default_grid() { return build_grid(20.0, 512); }

State bump_state(const GridPtr& g, const Params& p) {
  Field u = gaussian_bump(1.0, 80.0, g);
  Field v = 0.02 * gaussian_bump(1.5, 60.0, g);
  Field w = gaussian_bump(0.8, 20.0, g);
  return make_state(0.0, std::move(u), std::move(v), std::move(w), p);
}

}  // namespace

TEST_CASE("optimal constants and the chained identity") {
  CHECK(hls_constant() == doctest::Approx(std::sqrt(1.5) * kPi).epsilon(1e-15));
  CHECK(sobolev_constant() ==
        doctest::Approx(std::pow(2.0, 0.25) / (4.0 * std::sqrt(kPi)))
            .epsilon(1e-15));
  const double want = std::sqrt(3.0) / (64.0 * kPi * kPi);
  CHECK(std::abs(chained_constant() - want) < 1e-14);
}

TEST_CASE("sobolev_norm") {
  auto g = build_grid(10.0, 512);
  CHECK(sobolev_norm(Field(g), 0, 2.0) == 0.0);
  CHECK(sobolev_norm(Field(g), 2, 1.5) == 0.0);

  const Field c = sample(g, [](double) { return 3.0; });
  CHECK(rel_err(sobolev_norm(c, 1, 2.0), lp_norm(c, 2.0)) < 1e-12);

  // order-2 norm of a gaussian against fine quadrature of the analytic
  // radial derivatives
  const Field f = sample(g, [](double r) { return std::exp(-r * r); });
  const double got = sobolev_norm(f, 2, 2.0);
  auto fine = build_grid(10.0, 8192);
  const double want =
      lp_norm(sample(fine, [](double r) { return std::exp(-r * r); }), 2.0) +
      lp_norm(sample(fine,
                     [](double r) { return -2.0 * r * std::exp(-r * r); }),
              2.0) +
      lp_norm(sample(fine,
                     [](double r) {
                       return (4.0 * r * r - 8.0) * std::exp(-r * r);
                     }),
              2.0) +
      lp_norm(sample(fine, [](double r) { return -2.0 * std::exp(-r * r); }),
              2.0);
  CHECK(rel_err(got, want) < 1e-3);

  CHECK_THROWS_AS(sobolev_norm(f, 3, 2.0), std::invalid_argument);
}

TEST_CASE("modified_entropy") {
  auto g = default_grid();
  CHECK(modified_entropy(Field(g)) == 0.0);

  // refined-grid oracle for a closed-form integrand
  const auto profile = [](double r) { return 2.0 * std::exp(-r * r / 2.0); };
  const Field u = sample(g, profile);
  auto fine = build_grid(20.0, 4096);
  const Field u_fine = sample(fine, profile);
  CHECK(rel_err(modified_entropy(u), modified_entropy(u_fine)) < 1e-6);

  CHECK(modified_entropy(2.0 * u) >= modified_entropy(u));
  CHECK(modified_entropy(u) >= 0.0);

  const Field neg = sample(g, [](double r) { return r < 1 ? -0.5 : 0.0; });
  CHECK_THROWS_AS(modified_entropy(neg), std::domain_error);
}

TEST_CASE("chemical energy and its minimizer") {
  auto g = default_grid();
  const Params p{0.8, 1.4, 0.9, 2.1};

  const Field zero(g);
  const Field u = gaussian_bump(1.0, 100.0, g);
  CHECK(chemical_energy(zero, u, p) == 0.0);

  // no source: pure quadratic form, nonnegative
  const Field v =
      gaussian_bump(1.2, 50.0, g) - 0.7 * gaussian_bump(0.6, 20.0, g);
  CHECK(chemical_energy(v, zero, p) >= 0.0);

  // E(v_f; f) = -1/2 int v_f f
  const Field vf = biharmonic_factored_solve(u, p);
  const double e = chemical_energy(vf, u, p);
  CHECK(rel_err(e, -0.5 * inner(vf, u)) < 1e-8);
}

TEST_CASE("minimization gap") {
  auto g = build_grid(20.0, 1024);
  const Params p = kUnitParams;
  const Field u = gaussian_bump(1.0, 120.0, g);
  const Field v_u = biharmonic_factored_solve(u, p);

  SUBCASE("zero at the minimizer") {
    const auto mg = minimization_gap(v_u, u, p);
    const double scale = std::abs(chemical_energy(v_u, u, p)) + 1.0;
    CHECK(std::abs(mg.gap) < 1e-10 * scale);
    CHECK(std::abs(mg.quadratic_form) < 1e-10 * scale);
  }

  SUBCASE("gap equals the quadratic form, no linear term") {
    for (int k = 0; k < 5; ++k) {
      const Field delta = random_signed_mixture(g, 99, k);
      const Field v = v_u + delta;
      const auto mg = minimization_gap(v, u, p);
      CHECK(mg.gap >= -1e-8 * (std::abs(mg.gap) + 1.0));
      CHECK(std::abs(mg.gap - mg.quadratic_form) <=
            1e-8 *
                std::max({std::abs(mg.gap), std::abs(mg.quadratic_form), 1.0}));
    }
  }

  SUBCASE("nonnegative for random pairs") {
    for (int k = 0; k < 100; ++k) {
      const Field uu = random_bump_mixture(g, 7, k);
      const Field vv = random_signed_mixture(g, 8, k);
      const auto mg = minimization_gap(vv, uu, p);
      CHECK(mg.gap >= -1e-8 * (std::abs(mg.gap) + 1.0));
    }
  }
}

TEST_CASE("lyapunov functional and dissipation") {
  auto g = default_grid();
  const Params p = kUnitParams;

  SUBCASE("zero state") {
    const State s = make_state(0.0, Field(g), Field(g), Field(g), p);
    CHECK(lyapunov_F(s, p) == 0.0);
    CHECK(dissipation_D(s, p) == 0.0);
    CHECK(energy_L(s, p) == 0.0);
    CHECK(dissipation_D1(s, p) == 0.0);
  }

  SUBCASE("definitional consistency with diagnostics") {
    const State s = bump_state(g, p);
    const Diagnostics d = compute_diagnostics(s, p);
    CHECK(d.F_lyap == d.entropy + 0.5 * d.vt_l2_sq + d.E_chem);
    CHECK(rel_err(d.F_lyap, lyapunov_F(s, p)) < 1e-14);
    CHECK(d.entropy >= 0.0);
  }

  SUBCASE("F + 1/2 int u v_u >= 0 at the minimizer") {
    const Field u = gaussian_bump(1.0, 150.0, g);
    const Field v_u = biharmonic_factored_solve(u, p);
    const Field w = gaussian_bump(1.0, 30.0, g);
    const State s = make_state(0.0, u, v_u, w, p);
    const double f = lyapunov_F(s, p);
    CHECK(f + 0.5 * inner(u, v_u) >= -1e-10 * (std::abs(f) + 1.0));
  }

  SUBCASE("gradient terms of D vanish for matched constants") {
    // u = c, v = 2 log(1+c), w = lambda1 v, so vt = 0 and D = 0
    const double c = 1.7;
    const Field u = sample(g, [c](double) { return c; });
    const Field v = sample(g, [c](double) { return 2.0 * std::log1p(c); });
    const Field w = p.lambda1 * v;
    const State s = make_state(0.0, u, v, w, p);
    CHECK(s.vt.max_abs() < 1e-12);
    CHECK(std::abs(dissipation_D(s, p)) < 1e-12);
  }

  SUBCASE("dissipations are nonnegative on random states") {
    auto gf = build_grid(20.0, 1024);
    for (int k = 0; k < 20; ++k) {
      Field u = random_bump_mixture(gf, 31, 2 * k);
      Field w = random_bump_mixture(gf, 32, 2 * k + 1);
      Field v = 1e-3 * random_bump_mixture(gf, 33, k);
      const State s =
          make_state(0.0, std::move(u), std::move(v), std::move(w), p);
      CHECK(dissipation_D(s, p) >= 0.0);
      CHECK(dissipation_D1(s, p) >= 0.0);
    }
  }
}

TEST_CASE("lyapunov identity residual bookkeeping") {
  TimeSeries series;
  series.params = kUnitParams;
  CHECK_THROWS_AS(lyapunov_identity_residual(series), std::invalid_argument);

  // stationary zero solution
  for (int k = 0; k < 6; ++k) {
    series.records.push_back({0.1 * k, Diagnostics{}});
  }
  const auto res = lyapunov_identity_residual(series);
  CHECK(res.size() == 6);
  for (double r : res) CHECK(r == 0.0);
  CHECK(res[0] == 0.0);
}

TEST_CASE("energy_L structure") {
  auto g = default_grid();

  SUBCASE("lambda2 = 0 drops the potential term") {
    const Params p0{1.0, 1.0, 1.0, 0.0};
    const State s = bump_state(g, p0);
    const Field lap_v = apply_laplacian4_conservative(s.v);
    const double e0 = inner(s.vt, s.vt) + p0.d1 * p0.d2 * inner(lap_v, lap_v) +
                      (p0.d1 * p0.lambda2 + p0.d2 * p0.lambda1) *
                          gradient_energy(s.v) +
                      p0.lambda1 * p0.lambda2 * inner(s.v, s.v);
    const double want = modified_entropy(s.u) + e0 / (2.0 * p0.d1) +
                        inner(s.w, s.w) / (2.0 * p0.d1);
    CHECK(rel_err(energy_L(s, p0), want) < 1e-14);
  }

  SUBCASE("nonnegative and finite on random states") {
    const Params p = kUnitParams;
    auto gf = build_grid(20.0, 1024);
    for (int k = 0; k < 10; ++k) {
      Field u = random_bump_mixture(gf, 41, 2 * k);
      Field w = random_bump_mixture(gf, 42, 2 * k + 1);
      const State s =
          make_state(0.0, std::move(u), Field(gf), std::move(w), p);
      CHECK(energy_L(s, p) >= 0.0);
    }
  }

  SUBCASE("constant u kills the entropy-production term") {
    const Field c = sample(g, [](double) { return 2.0; });
    CHECK(grad_sq_over_one_plus(c) == 0.0);
  }
}

TEST_CASE("brezis-merle exponential integrability") {
  auto g = default_grid();
  const Params p = kUnitParams;

  SUBCASE("zero source") {
    const auto bm = brezis_merle_integral(Field(g), p);
    CHECK(bm.integral == 0.0);
    CHECK(bm.bound_rhs > 0.0);
  }

  SUBCASE("tiny mass linearizes to int v_f = mass/(l1 l2)") {
    const Field f = gaussian_bump(1.0, 1e-3, g);
    const auto bm = brezis_merle_integral(f, p);
    const double int_vf = integral(biharmonic_factored_solve(f, p));
    CHECK(rel_err(int_vf, 1e-3 / (p.lambda1 * p.lambda2)) < 1e-10);
    CHECK(std::abs(bm.integral - int_vf) <= 1e-4 * int_vf);
  }

  SUBCASE("monotone in the source amplitude") {
    const Field f = gaussian_bump(1.0, 40.0, g);
    const double i_half = brezis_merle_integral(0.5 * f, p).integral;
    const double i_one = brezis_merle_integral(f, p).integral;
    const double i_two = brezis_merle_integral(2.0 * f, p).integral;
    CHECK(i_half < i_one);
    CHECK(i_one < i_two);
    CHECK(std::isfinite(i_two));
  }

  SUBCASE("preconditions") {
    const Field f = gaussian_bump(1.0, 10.0, g);
    CHECK_THROWS_AS(brezis_merle_integral(f, Params{1.0, 1.0, 0.0, 1.0}),
                    std::invalid_argument);
    const double too_much = 32.0 * kPi * kPi + 1.0;
    CHECK_THROWS_AS(brezis_merle_integral(gaussian_bump(1.0, too_much, g), p),
                    std::domain_error);
  }
}

TEST_CASE("truncation sub-inequalities") {
  auto g = build_grid(20.0, 1024);

  SUBCASE("zero field") {
    for (const auto& rep : truncation_subinequalities(Field(g), 4.0)) {
      CHECK(rep.lhs == 0.0);
      CHECK(rep.rhs == 0.0);
      CHECK(rep.passed);
    }
  }

  SUBCASE("fields below N^2 have zero truncated part") {
    const double N = 4.0;
    const Field f = gaussian_bump(1.0, 10.0, g);  // peak ~ 1, below N^2 = 16
    const auto reps = truncation_subinequalities(f, N);
    CHECK(reps[0].lhs == 0.0);
    CHECK(reps[1].lhs == 0.0);
    CHECK(reps[0].passed);
    CHECK(reps[1].passed);
  }

  SUBCASE("randomized property suite") {
    for (int k = 0; k < 100; ++k) {
      const Field f = random_bump_mixture(g, 55, k);
      for (double N : {1.0, 4.0, 16.0}) {
        for (const auto& rep : truncation_subinequalities(f, N)) {
          CAPTURE(rep.name);
          CAPTURE(N);
          CHECK(rep.passed);
        }
      }
    }
  }

  CHECK_THROWS_AS(truncation_subinequalities(Field(g), 0.5),
                  std::invalid_argument);
}

TEST_CASE("modified sobolev bound") {
  auto g = build_grid(20.0, 1024);

  SUBCASE("zero field") {
    const auto rep = modified_sobolev_check(Field(g), 1.0);
    CHECK(rep.lhs == 0.0);
    CHECK(rep.passed);
  }

  SUBCASE("gaussian passes with positive margin") {
    const auto rep = modified_sobolev_check(gaussian_bump(1.0, 50.0, g), 1.0);
    CHECK(rep.margin > 0.0);
    CHECK(rep.passed);
  }

  SUBCASE("randomized property suite") {
    for (int k = 0; k < 100; ++k) {
      const Field f = random_bump_mixture(g, 77, k);
      for (double eps : {0.1, 1.0, 10.0}) {
        CHECK(modified_sobolev_check(f, eps).passed);
      }
    }
  }

  CHECK_THROWS_AS(modified_sobolev_check(Field(g), 0.0),
                  std::invalid_argument);
}

TEST_CASE("hls bound") {
  auto g = default_grid();

  SUBCASE("zero and gaussian") {
    CHECK(hls_check(Field(g)).passed);
    const auto rep = hls_check(gaussian_bump(1.0, 50.0, g));
    CHECK(rep.margin > 0.0);
    CHECK(rep.passed);
  }

  SUBCASE("margins shrink toward the extremal power-law shape") {
    double prev = 1e300;
    for (double beta : {2.25, 2.5, 2.75}) {
      const Field f = sample(
          g, [beta](double r) { return std::pow(1.0 + r * r, -beta); });
      const auto rep = hls_check(f);
      CHECK(rep.margin >= -rep.slack);
      CHECK(rep.margin < prev);
      prev = rep.margin;
    }
  }
}

TEST_CASE("sobolev bound") {
  auto g = default_grid();
  CHECK(sobolev_check(Field(g)).passed);
  const auto smooth = sobolev_check(gaussian_bump(1.0, 50.0, g));
  CHECK(smooth.margin > 0.0);

  // indicator-like steep profile, near-extremal for this embedding
  auto g2 = build_grid(20.0, 2048);
  const Field steep = sample(g2, [](double r) {
    return 0.5 * (1.0 - std::tanh((r - 2.0) / 0.05));
  });
  const auto rep = sobolev_check(steep);
  CHECK(rep.margin >= -rep.slack);
  CHECK(rep.margin / rep.rhs < 0.5 * smooth.margin / smooth.rhs);
}

TEST_CASE("chained estimate composes hls with the modified sobolev bound") {
  auto g = build_grid(20.0, 1024);
  const double c = hls_constant() / (4.0 * kPi * kPi);
  for (int k = 0; k < 25; ++k) {
    const Field f = random_bump_mixture(g, 123, k);
    const auto h = hls_check(f);
    const auto ms = modified_sobolev_check(f, 1.0);
    CHECK(h.lhs <= c * ms.rhs * (1.0 + 1e-10) + h.slack);
  }
}

TEST_CASE("bound_L fit") {
  TimeSeries series;
  series.params = kUnitParams;
  CHECK_THROWS_AS(bound_L_inequality_fit(series), std::invalid_argument);

  // stationary zero solution: any C1 works with C2 = 0
  for (int k = 0; k < 20; ++k) {
    series.records.push_back({0.05 * k, Diagnostics{}});
  }
  const auto fit = bound_L_inequality_fit(series);
  CHECK(fit.C1_hat > 0.0);
  CHECK(fit.C2_hat == 0.0);
  CHECK(fit.violation_fraction == 0.0);
  CHECK(fit.conforming);

  SUBCASE("runaway growth is flagged non-conforming but still fitted") {
    TimeSeries bad;
    bad.params = kUnitParams;
    for (int k = 0; k < 40; ++k) {
      Diagnostics d;
      d.L_energy = std::exp(0.8 * k);
      d.D1_diss = 0.0;
      bad.records.push_back({0.1 * k, d});
    }
    const auto f = bound_L_inequality_fit(bad);
    CHECK_FALSE(f.conforming);
    CHECK(f.violation_fraction > 0.01);
    CHECK(f.C1_hat > 0.0);
  }
}

TEST_CASE("inequality reports are reproducible") {
  auto g = build_grid(20.0, 1024);
  const Field f = random_bump_mixture(g, 2024, 17);
  const auto a = modified_sobolev_check(f, 1.0);
  const Field f2 = random_bump_mixture(g, 2024, 17);
  const auto b = modified_sobolev_check(f2, 1.0);
  CHECK(a.lhs == b.lhs);
  CHECK(a.rhs == b.rhs);
  CHECK(a.margin == b.margin);
}
