#include <doctest.h>

#include <cmath>

#include "chemo4d/elliptic.hpp"
#include "chemo4d/errors.hpp"
#include "chemo4d/evolution.hpp"
#include "chemo4d/functionals.hpp"
#include "test_helpers.hpp"

using namespace chemo4d;
using namespace chemo4d::testing;

namespace {
const Params kUnitParams{1.0, 1.0, 1.0, 1.0};
}

TEST_CASE("stepper config validation") {
  StepperConfig cfg;
  cfg.dt = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.dt = 1e-3;
  cfg.cfl_safety = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.cfl_safety = 0.5;
  cfg.snapshot_every = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("step enforces the CFL precondition") {
  auto g = build_grid(10.0, 128);
  Field u = gaussian_bump(1.0, 50.0, g);
  Field v = gaussian_bump(1.0, 5.0, g);  // nonzero drift
  const State s = make_state(0.0, u, v, Field(g), kUnitParams);
  StepperConfig cfg;
  const double limit = cfl_limit(s, cfg.cfl_safety);
  CHECK(std::isfinite(limit));
  CHECK_THROWS_AS(step(s, kUnitParams, 2.0 * limit, cfg), CflViolationError);
  CHECK_NOTHROW(step(s, kUnitParams, 0.5 * limit, cfg));
}

TEST_CASE("vt satisfies the v-equation after every step") {
  auto g = build_grid(10.0, 128);
  const Params p{0.8, 1.3, 0.6, 1.1};
  State s = make_state(0.0, gaussian_bump(1.0, 60.0, g), Field(g),
                       gaussian_bump(1.2, 10.0, g), p);
  StepperConfig cfg;
  cfg.dt = 5e-4;
  for (int k = 0; k < 10; ++k) {
    s = step(s, p, cfg.dt, cfg).state;
    const Field want = equation_vt(s.v, s.w, p);
    const double scale = lp_norm(s.w, 2.0) + p.lambda1 * lp_norm(s.v, 2.0) +
                         p.d1 * lp_norm(apply_laplacian4_conservative(s.v), 2.0);
    CHECK(lp_norm(s.vt - want, 2.0) <= 1e-8 * scale);
  }
}

TEST_CASE("mass of u is conserved exactly per step") {
  auto g = build_grid(10.0, 256);
  const Params p = kUnitParams;
  State s = make_state(0.0, gaussian_bump(1.0, 80.0, g),
                       0.05 * gaussian_bump(1.5, 40.0, g),
                       gaussian_bump(1.0, 10.0, g), p);
  StepperConfig cfg;
  const double m0 = mass(s.u);
  for (int k = 0; k < 20; ++k) {
    const auto r = step(s, p, 2e-4, cfg);
    s = r.state;
    CHECK(std::abs(mass(s.u) - r.clipped_mass - m0) / m0 < 1e-10);
    CHECK(s.u.min() >= 0.0);  // upwind advection + implicit diffusion
    CHECK(s.w.min() >= -tol_neg(s.w.max_abs()));
    (void)r;
  }
}

TEST_CASE("zero cell density stays zero while w decays exactly") {
  auto g = build_grid(20.0, 512);
  const Params p{1.0, 1.0, 1.0, 0.8};
  StepperConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  cfg.snapshot_every = 100;
  const TimeSeries s =
      run(Field(g), Field(g), gaussian_bump(1.0, 30.0, g), p, cfg);
  CHECK(s.records.back().diag.sup_u == 0.0);
  const double ratio =
      s.records.back().diag.mass_w / s.records.front().diag.mass_w;
  CHECK(rel_err(ratio, std::exp(-p.lambda2 * 1.0)) < 1e-6);
}

TEST_CASE("with the drift frozen at zero, u follows the heat semigroup") {
  auto g = build_grid(20.0, 512);
  const Params p = kUnitParams;
  const Field u0 = gaussian_bump(1.0, 50.0, g);
  StepperConfig cfg;
  const double dt = 2e-4;
  const double t_end = 0.5;
  State s = make_state(0.0, u0, Field(g), Field(g), p);
  const int steps = static_cast<int>(t_end / dt + 0.5);
  for (int k = 0; k < steps; ++k) {
    State next = step(s, p, dt, cfg).state;
    // freeze the chemical field so the advection stays off
    s = make_state(next.t, next.u, Field(g), Field(g), p);
  }
  const Field want = heat_semigroup(u0, 1.0, 0.0, t_end, 256);
  CHECK(lp_norm(s.u - want, 2.0) / lp_norm(want, 2.0) < 1e-3);
}

TEST_CASE("first-order self-convergence of the coupled step") {
  auto g = build_grid(20.0, 256);
  const Params p = kUnitParams;
  const Field u0 = gaussian_bump(1.0, 180.0, g);
  const Field w0 = gaussian_bump(1.5, 20.0, g);
  auto final_u = [&](double dt) {
    StepperConfig cfg;
    cfg.dt = dt;
    cfg.t_end = 0.5;
    cfg.snapshot_every = 1000000;
    cfg.keep_snapshots = true;
    return run(u0, Field(g), w0, p, cfg).snapshots.back().u;
  };
  const Field u1 = final_u(4e-3);
  const Field u2 = final_u(2e-3);
  const Field u3 = final_u(1e-3);
  const double ratio = lp_norm(u1 - u2, 2.0) / lp_norm(u2 - u3, 2.0);
  CHECK(ratio >= 1.7);
  CHECK(ratio <= 2.3);
}

TEST_CASE("run records and metadata") {
  auto g = build_grid(10.0, 128);
  const Params p = kUnitParams;
  const Field u0 = gaussian_bump(1.0, 20.0, g);

  SUBCASE("t_end = 0 yields a single record at t = 0") {
    StepperConfig cfg;
    cfg.t_end = 0.0;
    const TimeSeries s = run(u0, Field(g), Field(g), p, cfg);
    CHECK(s.records.size() == 1);
    CHECK(s.records.front().t == 0.0);
  }

  SUBCASE("records are strictly increasing and start at 0") {
    StepperConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 0.1;
    cfg.snapshot_every = 17;
    const TimeSeries s = run(u0, Field(g), Field(g), p, cfg);
    CHECK(s.records.front().t == 0.0);
    for (std::size_t i = 1; i < s.records.size(); ++i) {
      CHECK(s.records[i].t > s.records[i - 1].t);
    }
    CHECK(s.records.back().t == doctest::Approx(0.1).epsilon(1e-9));
  }

  SUBCASE("rejects bad initial data") {
    const Field neg = sample(g, [](double r) { return 0.5 - r; });
    StepperConfig cfg;
    CHECK_THROWS_AS(run(neg, Field(g), Field(g), p, cfg),
                    std::invalid_argument);
  }
}

TEST_CASE("subcritical run conserves mass to 1e-8") {
  auto g = build_grid(20.0, 512);
  const Params p = kUnitParams;
  const double m = 0.5 * threshold_constants(p).M_bounded;
  StepperConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 2.0;
  cfg.snapshot_every = 100;
  const TimeSeries s = run(gaussian_bump(1.0, m, g), Field(g), Field(g), p, cfg);
  const double m0 = s.records.front().diag.mass_u;
  for (const auto& r : s.records) {
    CHECK(std::abs(r.diag.mass_u - m0) / m0 <= 1e-8);
  }
  CHECK(s.clipped_mass_total <= 1e-8 * m0);
}

TEST_CASE("critical-scaling equivariance of the discrete evolution") {
  // lambda = 0: evolving mu-rescaled data for t/mu^2 matches the mu-rescaling
  // of the unscaled solution; node-exact grid correspondence at matched
  // resolution
  const Params p{1.0, 1.0, 0.0, 0.0};
  const double mu = 2.0;
  const std::size_t n = 512;
  auto g = build_grid(20.0, n);
  auto gm = build_grid(20.0 / mu, n);
  const Field u0 = gaussian_bump(1.0, 100.0, g);
  const Field w0 = gaussian_bump(1.2, 10.0, g);
  std::vector<double> um(n), wm(n);
  for (std::size_t i = 0; i < n; ++i) {
    um[i] = mu * mu * mu * mu * u0[i];
    wm[i] = mu * mu * w0[i];
  }
  StepperConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.25;
  cfg.snapshot_every = 1000000;
  cfg.keep_snapshots = true;
  const TimeSeries base = run(u0, Field(g), w0, p, cfg);
  StepperConfig cfgm = cfg;
  cfgm.dt = cfg.dt / (mu * mu);
  cfgm.t_end = cfg.t_end / (mu * mu);
  const TimeSeries scaled =
      run(Field(gm, std::move(um)), Field(gm), Field(gm, std::move(wm)), p,
          cfgm);
  const Field& ub = base.snapshots.back().u;
  const Field& us = scaled.snapshots.back().u;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double want = mu * mu * mu * mu * ub[i];
    num += (us[i] - want) * (us[i] - want);
    den += want * want;
  }
  CHECK(std::sqrt(num / den) <= 2e-2);
}

TEST_CASE("determinism: identical runs produce identical series") {
  auto g = build_grid(10.0, 128);
  StepperConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.3;
  cfg.snapshot_every = 10;
  const Field u0 = gaussian_bump(1.0, 40.0, g);
  const TimeSeries a = run(u0, Field(g), Field(g), kUnitParams, cfg, 5);
  const TimeSeries b = run(u0, Field(g), Field(g), kUnitParams, cfg, 5);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].t == b.records[i].t);
    CHECK(a.records[i].diag.F_lyap == b.records[i].diag.F_lyap);
    CHECK(a.records[i].diag.sup_u == b.records[i].diag.sup_u);
    CHECK(a.records[i].diag.D1_diss == b.records[i].diag.D1_diss);
  }
}

TEST_CASE("blowup indicator") {
  SUBCASE("rejects short series") {
    TimeSeries s;
    for (int k = 0; k < 7; ++k) s.records.push_back({0.1 * k, Diagnostics{}});
    CHECK_THROWS_AS(blowup_indicator(s), std::invalid_argument);
  }

  SUBCASE("zero data is bounded") {
    auto g = build_grid(10.0, 128);
    StepperConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_end = 1.0;
    cfg.snapshot_every = 10;
    const TimeSeries s =
        run(Field(g), Field(g), Field(g), kUnitParams, cfg);
    CHECK(blowup_indicator(s).verdict == Verdict::Bounded);
  }

  SUBCASE("subcritical run is bounded") {
    auto g = build_grid(20.0, 256);
    const double m = 0.5 * threshold_constants(kUnitParams).M_bounded;
    StepperConfig cfg;
    cfg.dt = 2e-3;
    cfg.t_end = 4.0;
    cfg.snapshot_every = 50;
    const TimeSeries s =
        run(gaussian_bump(1.0, m, g), Field(g), Field(g), kUnitParams, cfg);
    CHECK(blowup_indicator(s).verdict == Verdict::Bounded);
  }

  SUBCASE("synthetic growth is classified as growing") {
    TimeSeries s;
    for (int k = 0; k < 40; ++k) {
      Diagnostics d;
      d.sup_u = std::exp(0.3 * k);
      s.records.push_back({0.1 * k, d});
    }
    CHECK(blowup_indicator(s).verdict == Verdict::Growing);
  }

  SUBCASE("aborted series are reported as such") {
    TimeSeries s;
    for (int k = 0; k < 10; ++k) {
      Diagnostics d;
      d.sup_u = 1.0 + k;
      s.records.push_back({0.1 * k, d});
    }
    s.aborted = true;
    CHECK(blowup_indicator(s).verdict == Verdict::AbortedNonFinite);
  }
}
