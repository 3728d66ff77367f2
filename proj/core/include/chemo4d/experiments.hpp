#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chemo4d/evolution.hpp"
#include "chemo4d/functionals.hpp"
#include "chemo4d/params.hpp"

namespace chemo4d {

enum class ExperimentType {
  SingleRun,
  MassSweep,
  InequalitySuite,
  PicardCrosscheck,
};

const char* experiment_name(ExperimentType e);
ExperimentType parse_experiment(const std::string& name);

/// Flat scenario description; loadable from an INI-style key = value file
/// with sections [params], [grid], [stepper], [initial], [experiment],
/// [sweep], [ineq], [crosscheck], [output].
struct ScenarioConfig {
  Params params;
  double grid_R = 20.0;
  std::size_t grid_n = 512;
  StepperConfig stepper;

  double init_width = 1.0;
  double init_mass = -1.0;  // < 0 resolves to 0.5 * M_bounded(params)
  double w0_width = 1.0;
  double w0_mass = 0.0;

  ExperimentType experiment = ExperimentType::SingleRun;
  std::vector<double> sweep_masses;
  std::size_t ineq_witnesses = 100;
  double crosscheck_T = 0.05;
  std::size_t picard_mesh = 64;
  std::size_t picard_kmax = 25;
  double picard_tol = 1e-9;

  std::uint64_t seed = 0;
  std::string output_dir = "out";

  double resolved_init_mass() const;
  void validate() const;
};

ScenarioConfig load_config(const std::string& path);

/// Canonical text rendering; the config hash is FNV-1a over this string.
std::string canonical_config(const ScenarioConfig& cfg);
std::uint64_t config_hash(const ScenarioConfig& cfg);

/// Shortest round-trip decimal rendering of a double.
std::string format_double(double x);

/// Worker count: CHEMO4D_THREADS, default 1.
std::size_t worker_count();

struct SweepRow {
  double mass = 0.0;
  bool below_M_bounded = false;
  bool below_M_global = false;
  std::string verdict;
  double peak_growth = 0.0;
  double final_sup_u = 0.0;
  double max_L_energy = 0.0;
  BoundLFit fit;
  bool failed = false;
  std::string error;
};

std::vector<SweepRow> mass_sweep(const ScenarioConfig& cfg,
                                 const std::vector<double>& masses);

struct IneqRow {
  std::size_t witness_index = 0;
  std::string check;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double slack = 0.0;
  bool passed = false;
  std::string witness;
};

/// Random nonnegative mixture of 1-4 radial bumps, log-uniform widths in
/// [0.2, 4] and masses in [1, 500]; deterministic per (seed, index).
Field random_bump_mixture(const GridPtr& grid, std::uint64_t seed,
                          std::uint64_t index);
/// Signed mixture for minimization witnesses.
Field random_signed_mixture(const GridPtr& grid, std::uint64_t seed,
                            std::uint64_t index);

std::vector<IneqRow> inequality_suite(const ScenarioConfig& cfg,
                                      std::size_t n_witnesses);

struct CrosscheckReport {
  double T = 0.0;
  double diff_u = 0.0;  // relative L2 differences at t = T
  double diff_v = 0.0;
  double diff_w = 0.0;
  std::vector<double> ratios;
  bool contracted = false;
  bool converged = false;
};

CrosscheckReport picard_crosscheck(const ScenarioConfig& cfg, double T);

/// Write series.csv for one run (fixed column set, shortest round-trip
/// numbers, one row per snapshot).
void write_series_csv(const std::string& path, const TimeSeries& series);

/// Execute the configured experiment, writing series/sweep/inequality CSVs
/// plus summary.json into cfg.output_dir. Returns a process exit code;
/// failures leave a machine-readable error record in summary.json.
int run_scenario(const ScenarioConfig& cfg);

}  // namespace chemo4d
