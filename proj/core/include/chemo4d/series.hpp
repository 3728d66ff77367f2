#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chemo4d/state.hpp"

namespace chemo4d {

struct SeriesRecord {
  double t;
  Diagnostics diag;
};

/// Ordered diagnostics of one run plus enough metadata to reproduce it.
struct TimeSeries {
  Params params;
  double grid_R = 0.0;
  std::size_t grid_n = 0;

  std::vector<SeriesRecord> records;      // strictly increasing t, t0 = 0
  std::vector<State> snapshots;           // optional full states

  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  double dt = 0.0;
  std::string advection_scheme;           // "upwind" or "central"
  double clipped_mass_total = 0.0;        // mass added by negativity clipping

  bool aborted = false;                   // non-finite values encountered
  double abort_time = 0.0;
  std::string abort_reason;

  std::size_t steps_taken = 0;
};

}  // namespace chemo4d
