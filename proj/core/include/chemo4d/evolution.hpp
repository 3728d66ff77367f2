#pragma once

#include <cstdint>

#include "chemo4d/field.hpp"
#include "chemo4d/params.hpp"
#include "chemo4d/series.hpp"
#include "chemo4d/state.hpp"

namespace chemo4d {

enum class AdvectionScheme { Upwind, Central };

struct StepperConfig {
  double dt = 1e-3;
  double cfl_safety = 0.5;        // in (0, 1]
  double t_end = 10.0;
  std::size_t snapshot_every = 50;
  bool clip_negatives = true;
  AdvectionScheme advection = AdvectionScheme::Upwind;
  std::size_t max_steps = 4000000;
  bool keep_snapshots = false;

  void validate() const;
};

/// vt from the v-equation: d1 Lap v - lambda1 v + w (never a time difference).
Field equation_vt(const Field& v, const Field& w, const Params& params);

/// Build a State at time t with vt filled in from the equation.
State make_state(double t, Field u, Field v, Field w, const Params& params);

/// Advection stability limit: cfl_safety * h / max_faces |dv/dr|.
/// Infinite when v is flat.
double cfl_limit(const State& state, double cfl_safety);

struct StepResult {
  State state;
  double clipped_mass;  // mass added by clipping negatives to zero
};

/// One IMEX step: explicit flux-form advection of u along dv/dr, implicit
/// diffusion for u, backward Euler with exact decay factors for v and w
/// (sources w and u respectively), vt recomputed from the equation.
/// Throws CflViolationError if dt exceeds the advection limit and
/// NonFiniteError if the updated fields are not finite.
StepResult step(const State& state, const Params& params, double dt,
                const StepperConfig& cfg);

/// Integrate to cfg.t_end recording diagnostics every snapshot_every steps.
/// Step failures abort the run and are surfaced in the series metadata.
TimeSeries run(const Field& u0, const Field& v0, const Field& w0,
               const Params& params, const StepperConfig& cfg,
               std::uint64_t seed = 0);

enum class Verdict { Bounded, Growing, AbortedNonFinite };

struct BlowupReport {
  Verdict verdict;
  double peak_growth;  // peak sup-norm of u relative to its initial value
};

const char* verdict_name(Verdict v);

/// Heuristic classification of a completed (or aborted) series:
/// "growing" when sup_u rises monotonically by >= 10x over the last quarter
/// of the records, "bounded" when the last-half sup stays within twice the
/// first-half median.
BlowupReport blowup_indicator(const TimeSeries& series);

}  // namespace chemo4d
