#include "chemo4d/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "chemo4d/elliptic.hpp"
#include "chemo4d/errors.hpp"
#include "chemo4d/functionals.hpp"

namespace chemo4d {

void StepperConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("StepperConfig: dt must be > 0");
  if (!(cfl_safety > 0.0) || !(cfl_safety <= 1.0)) {
    throw std::invalid_argument("StepperConfig: cfl_safety must be in (0, 1]");
  }
  if (!(t_end >= 0.0)) {
    throw std::invalid_argument("StepperConfig: t_end must be >= 0");
  }
  if (snapshot_every == 0) {
    throw std::invalid_argument("StepperConfig: snapshot_every must be >= 1");
  }
}

Field equation_vt(const Field& v, const Field& w, const Params& params) {
  const Field lv = apply_laplacian4_conservative(v);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = params.d1 * lv[i] - params.lambda1 * v[i] + w[i];
  }
  return Field(v.grid_ptr(), std::move(out));
}

State make_state(double t, Field u, Field v, Field w, const Params& params) {
  Field vt = equation_vt(v, w, params);
  return State(t, std::move(u), std::move(v), std::move(w), std::move(vt));
}

double cfl_limit(const State& state, double cfl_safety) {
  const double h = state.v.grid().h();
  double vmax = 0.0;
  for (std::size_t i = 0; i + 1 < state.v.size(); ++i) {
    vmax = std::max(vmax, std::abs(state.v[i + 1] - state.v[i]) / h);
  }
  if (vmax == 0.0) return std::numeric_limits<double>::infinity();
  return cfl_safety * h / vmax;
}

StepResult step(const State& state, const Params& params, double dt,
                const StepperConfig& cfg) {
  params.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");

  const double limit = cfl_limit(state, cfg.cfl_safety);
  if (dt > limit * (1.0 + 1e-12)) throw CflViolationError(dt, limit);

  const RadialGrid& g = state.u.grid();
  const std::size_t n = g.n();
  const double h = g.h();
  const auto& fc = g.face_conductance();
  const auto& qw = g.weights();

  // explicit conservative advection of u along dv/dr, zero end fluxes
  std::vector<double> ustar(n);
  {
    std::vector<double> flux(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double c = (state.v[i + 1] - state.v[i]) / h;
      double uf;
      if (cfg.advection == AdvectionScheme::Upwind) {
        uf = c > 0.0 ? state.u[i] : state.u[i + 1];
      } else {
        uf = 0.5 * (state.u[i] + state.u[i + 1]);
      }
      flux[i] = fc[i] * c * uf;
    }
    double flux_lo = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double flux_hi = (i + 1 < n) ? flux[i] : 0.0;
      ustar[i] = state.u[i] - dt * (flux_hi - flux_lo) / qw[i];
      flux_lo = flux_hi;
    }
  }

  // implicit updates via (I - dt d L) = dt (-d L + 1/dt)
  const double inv_dt = 1.0 / dt;
  const HelmholtzSolver diff_u(state.u.grid_ptr(), 1.0, inv_dt,
                               OuterClosure::Neumann);
  const HelmholtzSolver diff_w(state.u.grid_ptr(), params.d2, inv_dt,
                               OuterClosure::Neumann);
  const HelmholtzSolver diff_v(state.u.grid_ptr(), params.d1, inv_dt,
                               OuterClosure::Neumann);

  for (double& x : ustar) x *= inv_dt;
  Field u_new = diff_u.solve(Field(state.u.grid_ptr(), std::move(ustar)));

  double clipped = 0.0;
  if (cfg.clip_negatives) {
    std::vector<double> v = u_new.values();
    double clipped_r3 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (v[i] < 0.0) {
        clipped_r3 += qw[i] * (-v[i]);
        v[i] = 0.0;
      }
    }
    clipped = kSphereArea3 * clipped_r3;
    u_new = Field(state.u.grid_ptr(), std::move(v));
  }

  // w: backward Euler diffusion + source, then the exact decay factor
  std::vector<double> rhs_w(n);
  for (std::size_t i = 0; i < n; ++i) {
    rhs_w[i] = inv_dt * (state.w[i] + dt * u_new[i]);
  }
  Field w_new = diff_w.solve(Field(state.u.grid_ptr(), std::move(rhs_w)));
  const double decay_w = std::exp(-params.lambda2 * dt);
  w_new = decay_w * w_new;

  std::vector<double> rhs_v(n);
  for (std::size_t i = 0; i < n; ++i) {
    rhs_v[i] = inv_dt * (state.v[i] + dt * w_new[i]);
  }
  Field v_new = diff_v.solve(Field(state.u.grid_ptr(), std::move(rhs_v)));
  const double decay_v = std::exp(-params.lambda1 * dt);
  v_new = decay_v * v_new;

  const double t_new = state.t + dt;
  if (!u_new.all_finite() || !v_new.all_finite() || !w_new.all_finite()) {
    throw NonFiniteError("step: non-finite field values", t_new);
  }

  Field vt_new = equation_vt(v_new, w_new, params);
  return {State(t_new, std::move(u_new), std::move(v_new), std::move(w_new),
                std::move(vt_new)),
          clipped};
}

TimeSeries run(const Field& u0, const Field& v0, const Field& w0,
               const Params& params, const StepperConfig& cfg,
               std::uint64_t seed) {
  params.validate();
  cfg.validate();
  {
    const double fu = -tol_neg(u0.max_abs());
    const double fw = -tol_neg(w0.max_abs());
    for (double x : u0.values()) {
      if (x < fu) throw std::invalid_argument("run: u0 must be nonnegative");
    }
    for (double x : w0.values()) {
      if (x < fw) throw std::invalid_argument("run: w0 must be nonnegative");
    }
  }
  v0.require_finite("run");

  TimeSeries series;
  series.params = params;
  series.grid_R = u0.grid().R();
  series.grid_n = u0.grid().n();
  series.seed = seed;
  series.dt = cfg.dt;
  series.advection_scheme =
      cfg.advection == AdvectionScheme::Upwind ? "upwind" : "central";

  State state = make_state(0.0, u0, v0, w0, params);
  series.records.push_back({0.0, compute_diagnostics(state, params)});
  if (cfg.keep_snapshots) series.snapshots.push_back(state);

  const double t_eps = 1e-12 * std::max(cfg.t_end, 1.0);
  std::size_t steps = 0;
  bool recorded_last = true;
  while (state.t < cfg.t_end - t_eps && steps < cfg.max_steps) {
    const double dt_eff = std::min(
        {cfg.dt, cfl_limit(state, cfg.cfl_safety), cfg.t_end - state.t});
    try {
      StepResult r = step(state, params, dt_eff, cfg);
      state = std::move(r.state);
      series.clipped_mass_total += r.clipped_mass;
    } catch (const NonFiniteError& e) {
      series.aborted = true;
      series.abort_time = e.time;
      series.abort_reason = e.what();
      break;
    }
    ++steps;
    recorded_last = false;
    if (steps % cfg.snapshot_every == 0 || state.t >= cfg.t_end - t_eps) {
      series.records.push_back({state.t, compute_diagnostics(state, params)});
      if (cfg.keep_snapshots) series.snapshots.push_back(state);
      recorded_last = true;
    }
  }
  if (!recorded_last && !series.aborted) {
    series.records.push_back({state.t, compute_diagnostics(state, params)});
    if (cfg.keep_snapshots) series.snapshots.push_back(state);
  }
  series.steps_taken = steps;
  return series;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Bounded: return "bounded";
    case Verdict::Growing: return "growing";
    case Verdict::AbortedNonFinite: return "aborted-nonfinite";
  }
  return "unknown";
}

BlowupReport blowup_indicator(const TimeSeries& series) {
  const auto& rec = series.records;
  if (rec.size() < 8) {
    throw std::invalid_argument("blowup_indicator: need at least 8 records");
  }
  std::vector<double> s(rec.size());
  for (std::size_t i = 0; i < rec.size(); ++i) s[i] = rec[i].diag.sup_u;

  double denom = s.front();
  if (denom <= 0.0) {
    for (double x : s) {
      if (x > 0.0) { denom = x; break; }
    }
    if (denom <= 0.0) denom = 1.0;
  }
  const double peak = *std::max_element(s.begin(), s.end()) / denom;

  if (series.aborted) return {Verdict::AbortedNonFinite, peak};

  // growing: monotone rise by >= 10x over the last quarter of the records
  const std::size_t q = std::max<std::size_t>(2, s.size() / 4);
  bool monotone = true;
  for (std::size_t i = s.size() - q; i + 1 < s.size(); ++i) {
    if (s[i + 1] < s[i]) { monotone = false; break; }
  }
  const double wmin = *std::min_element(s.end() - q, s.end());
  if (monotone && s.back() > wmin && s.back() >= 10.0 * wmin) {
    return {Verdict::Growing, peak};
  }

  // bounded: last-half sup within twice the first-half median
  const std::size_t half = s.size() / 2;
  std::vector<double> first(s.begin(), s.begin() + half);
  std::nth_element(first.begin(), first.begin() + first.size() / 2,
                   first.end());
  const double med = first[first.size() / 2];
  const double last_sup = *std::max_element(s.begin() + half, s.end());
  if (last_sup <= 2.0 * med) return {Verdict::Bounded, peak};

  return {Verdict::Growing, peak};
}

}  // namespace chemo4d
