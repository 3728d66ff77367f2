#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chemo4d/field.hpp"
#include "chemo4d/grid.hpp"
#include "chemo4d/params.hpp"
#include "test_helpers.hpp"

using namespace chemo4d;
using namespace chemo4d::testing;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kPiSq = kPi * kPi;
}  // namespace

TEST_CASE("build_grid basics") {
  auto g = build_grid(20.0, 512);
  CHECK(g->h() == doctest::Approx(20.0 / 511.0).epsilon(1e-15));
  CHECK(g->node(0) == 0.0);
  CHECK(g->node(511) == 20.0);
  for (std::size_t i = 1; i < g->n(); ++i) {
    CHECK(g->node(i) > g->node(i - 1));
  }
  for (double w : g->weights()) CHECK(w >= 0.0);

  CHECK_THROWS_AS(build_grid(20.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(std::nan(""), 64), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(-1.0, 64), std::invalid_argument);
}

TEST_CASE("quadrature exact for constants, second order for r") {
  auto g = build_grid(20.0, 512);
  // int_0^R r^3 dr = R^4/4 = 40000, exact to roundoff
  std::vector<double> ones(g->n(), 1.0);
  CHECK(rel_err(g->integrate_r3(ones), 40000.0) < 1e-12);
  // int_0^R r^4 dr = R^5/5
  std::vector<double> lin(g->n());
  for (std::size_t i = 0; i < g->n(); ++i) lin[i] = g->node(i);
  CHECK(rel_err(g->integrate_r3(lin), 20.0 * 20.0 * 20.0 * 20.0 * 20.0 / 5.0) <
        1e-4);
}

TEST_CASE("lp_norm") {
  auto g = build_grid(20.0, 512);
  const Field zero(g);
  CHECK(lp_norm(zero, 1.0) == 0.0);
  CHECK(lp_norm(zero, 2.0) == 0.0);
  CHECK(lp_norm(zero, kInfExponent) == 0.0);

  const Field gauss = sample(g, [](double r) { return std::exp(-r * r); });
  // int r^3 e^{-r^2} dr = 1/2, so ||f||_1 = pi^2
  CHECK(rel_err(lp_norm(gauss, 1.0), kPiSq) < 1e-6);
  CHECK(lp_norm(gauss, kInfExponent) == doctest::Approx(1.0));

  CHECK_THROWS_AS(lp_norm(gauss, 0.5), std::invalid_argument);

  // monotone in |f| pointwise
  const Field bigger = 2.0 * gauss;
  for (double p : {1.0, 1.5, 2.0, 4.0 / 3.0}) {
    CHECK(lp_norm(bigger, p) > lp_norm(gauss, p));
  }
}

TEST_CASE("quadrature exactness invariant for constant fields") {
  auto g = build_grid(20.0, 512);
  const Field c = sample(g, [](double) { return 3.25; });
  CHECK(rel_err(lp_norm(c, 1.0), 3.25 * kSphereArea3 * 40000.0) < 1e-12);
}

TEST_CASE("mass") {
  auto g = build_grid(20.0, 512);
  CHECK(mass(Field(g)) == 0.0);
  const Field gauss = sample(g, [](double r) { return std::exp(-r * r); });
  CHECK(rel_err(mass(gauss), kPiSq) < 1e-6);
  CHECK(mass(gauss) == lp_norm(gauss, 1.0));

  const Field bump = gaussian_bump(1.0, 100.0, g);
  CHECK(rel_err(mass(bump), 100.0) < 1e-10);

  const Field neg = sample(g, [](double r) { return r < 1.0 ? -1.0 : 0.0; });
  CHECK_THROWS_AS(mass(neg), std::domain_error);
}

TEST_CASE("gaussian_bump") {
  auto g = build_grid(20.0, 512);
  const Field zero = gaussian_bump(1.0, 0.0, g);
  CHECK(lp_norm(zero, kInfExponent) == 0.0);

  // mass pi^2 at width 1 has unit amplitude
  const Field unit = gaussian_bump(1.0, kPiSq, g);
  CHECK(rel_err(unit[0], 1.0) < 1e-6);

  // doubling the mass doubles every value
  const Field a = gaussian_bump(0.7, 10.0, g);
  const Field b = gaussian_bump(0.7, 20.0, g);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(b[i] == doctest::Approx(2.0 * a[i]).epsilon(1e-14));
  }

  CHECK_THROWS_AS(gaussian_bump(0.1, 1.0, g), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_bump(1.0, -1.0, g), std::invalid_argument);
}

TEST_CASE("threshold_constants") {
  const Params p{1.0, 1.0, 1.0, 1.0};
  const ThresholdConstants th = threshold_constants(p);
  CHECK(rel_err(th.M_global, 64.0 * kPiSq) < 1e-14);
  CHECK(th.M_global == doctest::Approx(631.6547).epsilon(1e-6));
  CHECK(th.M_bounded == doctest::Approx(364.686).epsilon(1e-5));
  CHECK(rel_err(th.M_bounded / th.M_global, 1.0 / std::sqrt(3.0)) < 1e-14);
  // kappa_star * M_global = sqrt(3) d1 d2
  CHECK(std::abs(th.kappa_star * th.M_global - std::sqrt(3.0)) < 1e-14);

  const Params p2{2.0, 0.5, 0.0, 3.0};
  const ThresholdConstants th2 = threshold_constants(p2);
  CHECK(rel_err(th2.M_bounded / th2.M_global, 1.0 / std::sqrt(3.0)) < 1e-14);
  CHECK(std::abs(th2.kappa_star * th2.M_global -
                 std::sqrt(3.0) * p2.d1 * p2.d2) < 1e-12);

  CHECK_THROWS_AS(threshold_constants(Params{0.0, 1.0, 1.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(threshold_constants(Params{1.0, 1.0, -1.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("mass is invariant under the critical rescaling") {
  // f_mu(r) = mu^4 f(mu r) on the grid with R/mu and the same n
  const double mu = 2.0;
  auto g = build_grid(20.0, 512);
  auto g_mu = build_grid(20.0 / mu, 512);
  const Field f = sample(g, [](double r) { return std::exp(-r * r); });
  const Field f_mu = sample(g_mu, [mu](double r) {
    return mu * mu * mu * mu * std::exp(-(mu * r) * (mu * r));
  });
  CHECK(rel_err(mass(f_mu), mass(f)) < 1e-10);
}

TEST_CASE("field validation") {
  auto g = build_grid(10.0, 64);
  CHECK_THROWS_AS(Field(g, std::vector<double>(63, 0.0)),
                  std::invalid_argument);
  Field bad = sample(g, [](double r) { return r; });
  std::vector<double> v = bad.values();
  v[5] = std::nan("");
  const Field nanf(g, std::move(v));
  CHECK_FALSE(nanf.all_finite());
  CHECK_THROWS_AS(lp_norm(nanf, 2.0), std::domain_error);
}
