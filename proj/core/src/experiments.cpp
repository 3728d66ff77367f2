#include "chemo4d/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "chemo4d/elliptic.hpp"
#include "chemo4d/errors.hpp"
#include "chemo4d/picard.hpp"

namespace chemo4d {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

const char* experiment_name(ExperimentType e) {
  switch (e) {
    case ExperimentType::SingleRun: return "single_run";
    case ExperimentType::MassSweep: return "mass_sweep";
    case ExperimentType::InequalitySuite: return "inequality_suite";
    case ExperimentType::PicardCrosscheck: return "picard_crosscheck";
  }
  return "unknown";
}

ExperimentType parse_experiment(const std::string& name) {
  if (name == "single_run") return ExperimentType::SingleRun;
  if (name == "mass_sweep") return ExperimentType::MassSweep;
  if (name == "inequality_suite") return ExperimentType::InequalitySuite;
  if (name == "picard_crosscheck") return ExperimentType::PicardCrosscheck;
  throw std::invalid_argument("unknown experiment type: " + name);
}

double ScenarioConfig::resolved_init_mass() const {
  if (init_mass >= 0.0) return init_mass;
  return 0.5 * threshold_constants(params).M_bounded;
}

void ScenarioConfig::validate() const {
  params.validate();
  stepper.validate();
  if (!(grid_R > 0.0)) throw std::invalid_argument("config: R must be > 0");
  if (grid_n < 16) throw std::invalid_argument("config: n must be >= 16");
  if (!(init_width > 0.0)) {
    throw std::invalid_argument("config: bump width must be > 0");
  }
  for (double m : sweep_masses) {
    if (!(m > 0.0)) {
      throw std::invalid_argument("config: sweep masses must be > 0");
    }
  }
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::size_t worker_count() {
  if (const char* env = std::getenv("CHEMO4D_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_num(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for " + key + ": " + v);
  }
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config: bad flag for " + key + ": " + v);
}

std::vector<double> parse_mass_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_num(item, "masses"));
  }
  return out;
}

}  // namespace

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  ScenarioConfig cfg;
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: expected key = value at line " +
                                  std::to_string(lineno));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string qual = section + "." + key;

    if (qual == "params.d1") cfg.params.d1 = parse_num(value, qual);
    else if (qual == "params.d2") cfg.params.d2 = parse_num(value, qual);
    else if (qual == "params.lambda1") cfg.params.lambda1 = parse_num(value, qual);
    else if (qual == "params.lambda2") cfg.params.lambda2 = parse_num(value, qual);
    else if (qual == "grid.R") cfg.grid_R = parse_num(value, qual);
    else if (qual == "grid.n") cfg.grid_n = static_cast<std::size_t>(parse_num(value, qual));
    else if (qual == "stepper.dt") cfg.stepper.dt = parse_num(value, qual);
    else if (qual == "stepper.cfl_safety") cfg.stepper.cfl_safety = parse_num(value, qual);
    else if (qual == "stepper.t_end") cfg.stepper.t_end = parse_num(value, qual);
    else if (qual == "stepper.snapshot_every") cfg.stepper.snapshot_every = static_cast<std::size_t>(parse_num(value, qual));
    else if (qual == "stepper.clip_negatives") cfg.stepper.clip_negatives = parse_bool(value, qual);
    else if (qual == "stepper.max_steps") cfg.stepper.max_steps = static_cast<std::size_t>(parse_num(value, qual));
    else if (qual == "stepper.advection") {
      if (value == "upwind") cfg.stepper.advection = AdvectionScheme::Upwind;
      else if (value == "central") cfg.stepper.advection = AdvectionScheme::Central;
      else throw std::invalid_argument("config: advection must be upwind or central");
    }
    else if (qual == "initial.width") cfg.init_width = parse_num(value, qual);
    else if (qual == "initial.mass") cfg.init_mass = parse_num(value, qual);
    else if (qual == "initial.w0_width") cfg.w0_width = parse_num(value, qual);
    else if (qual == "initial.w0_mass") cfg.w0_mass = parse_num(value, qual);
    else if (qual == "experiment.type") cfg.experiment = parse_experiment(value);
    else if (qual == "experiment.seed") cfg.seed = static_cast<std::uint64_t>(parse_num(value, qual));
    else if (qual == "sweep.masses") cfg.sweep_masses = parse_mass_list(value);
    else if (qual == "ineq.witnesses") cfg.ineq_witnesses = static_cast<std::size_t>(parse_num(value, qual));
    else if (qual == "crosscheck.T") cfg.crosscheck_T = parse_num(value, qual);
    else if (qual == "crosscheck.mesh") cfg.picard_mesh = static_cast<std::size_t>(parse_num(value, qual));
    else if (qual == "crosscheck.k_max") cfg.picard_kmax = static_cast<std::size_t>(parse_num(value, qual));
    else if (qual == "crosscheck.tol") cfg.picard_tol = parse_num(value, qual);
    else if (qual == "output.dir") cfg.output_dir = value;
    else {
      throw std::invalid_argument("config: unknown key " + qual + " at line " +
                                  std::to_string(lineno));
    }
  }
  cfg.validate();
  return cfg;
}

std::string canonical_config(const ScenarioConfig& cfg) {
  std::ostringstream os;
  os << "params.d1=" << format_double(cfg.params.d1) << '\n'
     << "params.d2=" << format_double(cfg.params.d2) << '\n'
     << "params.lambda1=" << format_double(cfg.params.lambda1) << '\n'
     << "params.lambda2=" << format_double(cfg.params.lambda2) << '\n'
     << "grid.R=" << format_double(cfg.grid_R) << '\n'
     << "grid.n=" << cfg.grid_n << '\n'
     << "stepper.dt=" << format_double(cfg.stepper.dt) << '\n'
     << "stepper.cfl_safety=" << format_double(cfg.stepper.cfl_safety) << '\n'
     << "stepper.t_end=" << format_double(cfg.stepper.t_end) << '\n'
     << "stepper.snapshot_every=" << cfg.stepper.snapshot_every << '\n'
     << "stepper.clip_negatives=" << (cfg.stepper.clip_negatives ? 1 : 0) << '\n'
     << "stepper.advection="
     << (cfg.stepper.advection == AdvectionScheme::Upwind ? "upwind" : "central") << '\n'
     << "stepper.max_steps=" << cfg.stepper.max_steps << '\n'
     << "initial.width=" << format_double(cfg.init_width) << '\n'
     << "initial.mass=" << format_double(cfg.init_mass) << '\n'
     << "initial.w0_width=" << format_double(cfg.w0_width) << '\n'
     << "initial.w0_mass=" << format_double(cfg.w0_mass) << '\n'
     << "experiment.type=" << experiment_name(cfg.experiment) << '\n'
     << "experiment.seed=" << cfg.seed << '\n';
  os << "sweep.masses=";
  for (std::size_t i = 0; i < cfg.sweep_masses.size(); ++i) {
    if (i) os << ',';
    os << format_double(cfg.sweep_masses[i]);
  }
  os << '\n'
     << "ineq.witnesses=" << cfg.ineq_witnesses << '\n'
     << "crosscheck.T=" << format_double(cfg.crosscheck_T) << '\n'
     << "crosscheck.mesh=" << cfg.picard_mesh << '\n'
     << "crosscheck.k_max=" << cfg.picard_kmax << '\n'
     << "crosscheck.tol=" << format_double(cfg.picard_tol) << '\n';
  return os.str();
}

std::uint64_t config_hash(const ScenarioConfig& cfg) {
  const std::string text = canonical_config(cfg);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Uniform in [0, 1) from 53 bits; identical across platforms.
double uniform01(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double log_uniform(std::uint64_t bits, double lo, double hi) {
  return lo * std::pow(hi / lo, uniform01(bits));
}

struct MixtureSpec {
  std::vector<double> widths;
  std::vector<double> masses;
  std::vector<int> signs;
  std::string describe(bool signed_mix) const {
    std::ostringstream os;
    os << "bumps=" << widths.size();
    for (std::size_t i = 0; i < widths.size(); ++i) {
      os << ";w" << i << "=" << format_double(widths[i])
         << ";m" << i << "=" << format_double(signed_mix ? signs[i] * masses[i]
                                                          : masses[i]);
    }
    return os.str();
  }
};

MixtureSpec draw_mixture(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed ^ (0xabcd1234ull + index * 0x9e3779b97f4a7c15ull);
  // warm up the stream so nearby indices decorrelate
  splitmix64(s);
  splitmix64(s);
  MixtureSpec spec;
  const std::size_t k = 1 + (splitmix64(s) % 4);
  for (std::size_t i = 0; i < k; ++i) {
    spec.widths.push_back(log_uniform(splitmix64(s), 0.2, 4.0));
    spec.masses.push_back(log_uniform(splitmix64(s), 1.0, 500.0));
    spec.signs.push_back((splitmix64(s) & 1) ? 1 : -1);
  }
  return spec;
}

Field build_mixture(const GridPtr& grid, const MixtureSpec& spec,
                    bool signed_mix) {
  Field acc(grid);
  for (std::size_t i = 0; i < spec.widths.size(); ++i) {
    Field b = gaussian_bump(spec.widths[i], spec.masses[i], grid);
    acc = acc + ((signed_mix && spec.signs[i] < 0) ? -1.0 : 1.0) * b;
  }
  return acc;
}

template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= count) break;
          fn(i);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

TimeSeries run_single(const ScenarioConfig& cfg, double mass_u,
                      bool keep_snapshots = false, double t_end = -1.0) {
  GridPtr grid = build_grid(cfg.grid_R, cfg.grid_n);
  Field u0 = gaussian_bump(cfg.init_width, mass_u, grid);
  Field v0(grid);
  Field w0 = cfg.w0_mass > 0.0
                 ? gaussian_bump(cfg.w0_width, cfg.w0_mass, grid)
                 : Field(grid);
  StepperConfig st = cfg.stepper;
  st.keep_snapshots = keep_snapshots;
  if (t_end >= 0.0) st.t_end = t_end;
  return run(u0, v0, w0, cfg.params, st, cfg.seed);
}

}  // namespace

Field random_bump_mixture(const GridPtr& grid, std::uint64_t seed,
                          std::uint64_t index) {
  return build_mixture(grid, draw_mixture(seed, index), false);
}

Field random_signed_mixture(const GridPtr& grid, std::uint64_t seed,
                            std::uint64_t index) {
  return build_mixture(grid, draw_mixture(seed, index), true);
}

std::vector<SweepRow> mass_sweep(const ScenarioConfig& cfg,
                                 const std::vector<double>& masses) {
  for (std::size_t i = 1; i < masses.size(); ++i) {
    if (masses[i] < masses[i - 1]) {
      throw std::invalid_argument("mass_sweep: masses must be ascending");
    }
  }
  const ThresholdConstants th = threshold_constants(cfg.params);
  std::vector<SweepRow> rows(masses.size());
  parallel_for(masses.size(), [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.mass = masses[i];
    row.below_M_bounded = masses[i] < th.M_bounded;
    row.below_M_global = masses[i] < th.M_global;
    try {
      TimeSeries series = run_single(cfg, masses[i]);
      const BlowupReport rep = blowup_indicator(series);
      row.verdict = verdict_name(rep.verdict);
      row.peak_growth = rep.peak_growth;
      row.final_sup_u = series.records.back().diag.sup_u;
      for (const auto& r : series.records) {
        row.max_L_energy = std::max(row.max_L_energy, r.diag.L_energy);
      }
      if (series.records.size() >= 16) {
        row.fit = bound_L_inequality_fit(series);
      }
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
  });
  return rows;
}

std::vector<IneqRow> inequality_suite(const ScenarioConfig& cfg,
                                      std::size_t n_witnesses) {
  if (n_witnesses < 1) {
    throw std::invalid_argument("inequality_suite: need at least 1 witness");
  }
  GridPtr grid = build_grid(cfg.grid_R, cfg.grid_n);
  if (8.0 * grid->h() > 0.2) {
    throw std::invalid_argument(
        "inequality_suite: grid too coarse for the width-0.2 witness family "
        "(need 8h <= 0.2, e.g. n >= 801 at R = 20)");
  }
  const double eps_values[] = {0.1, 1.0, 10.0};
  const double n_values[] = {1.0, 4.0, 16.0};

  std::vector<std::vector<IneqRow>> per_witness(n_witnesses);
  parallel_for(n_witnesses, [&](std::size_t i) {
    const MixtureSpec spec = draw_mixture(cfg.seed, i);
    const Field f = build_mixture(grid, spec, false);
    const std::string desc = spec.describe(false);
    auto& rows = per_witness[i];
    auto push = [&](InequalityReport rep, const std::string& extra = "") {
      IneqRow row;
      row.witness_index = i;
      row.check = extra.empty() ? rep.name : rep.name + "[" + extra + "]";
      row.lhs = rep.lhs;
      row.rhs = rep.rhs;
      row.margin = rep.margin;
      row.slack = rep.slack;
      row.passed = rep.passed;
      row.witness = desc;
      rows.push_back(std::move(row));
    };

    push(hls_check(f));
    push(sobolev_check(f));
    for (double eps : eps_values) {
      push(modified_sobolev_check(f, eps), "eps=" + format_double(eps));
    }
    for (double N : n_values) {
      for (auto& rep : truncation_subinequalities(f, N)) {
        push(rep, "N=" + format_double(N));
      }
    }
    // minimization against an independent signed chemical profile
    const Field v = random_signed_mixture(grid, cfg.seed ^ 0x5eedull, i);
    const MinimizationGap mg = minimization_gap(v, f, cfg.params);
    const double scale =
        std::max({1.0, std::abs(mg.gap), std::abs(mg.quadratic_form)});
    push(make_report("minimization_gap_nonneg", -mg.gap, 0.0, desc,
                     1e-8 * scale));
    push(make_report("minimization_gap_equality",
                     std::abs(mg.gap - mg.quadratic_form), 1e-8 * scale, desc,
                     0.0));
  });

  std::vector<IneqRow> rows;
  // the exact-constant identity heads the table
  {
    const double lhs = chained_constant();
    const double rhs = std::sqrt(3.0) / (64.0 * std::numbers::pi * std::numbers::pi);
    IneqRow row;
    row.witness_index = 0;
    row.check = "constant_identity";
    row.lhs = lhs;
    row.rhs = rhs;
    row.margin = std::abs(rhs - lhs);
    row.slack = 1e-14;
    row.passed = row.margin <= 1e-14;
    row.witness = "C_HLS*C_S^2/(4 pi^2) vs sqrt(3)/(8 pi)^2";
    rows.push_back(std::move(row));
  }
  for (auto& w : per_witness) {
    for (auto& r : w) rows.push_back(std::move(r));
  }
  return rows;
}

CrosscheckReport picard_crosscheck(const ScenarioConfig& cfg, double T) {
  if (!(T > 0.0) || T > 0.5) {
    throw std::invalid_argument("picard_crosscheck: need 0 < T <= 0.5");
  }
  GridPtr grid = build_grid(cfg.grid_R, cfg.grid_n);
  Field u0 = gaussian_bump(cfg.init_width, cfg.resolved_init_mass(), grid);
  Field v0(grid);
  Field w0 = cfg.w0_mass > 0.0
                 ? gaussian_bump(cfg.w0_width, cfg.w0_mass, grid)
                 : Field(grid);

  CrosscheckReport rep;
  rep.T = T;

  MildData data{u0, v0, w0};
  PicardResult pic = picard_iterate(data, cfg.params, T, cfg.picard_kmax,
                                    cfg.picard_tol, cfg.picard_mesh);
  rep.ratios = pic.ratios;
  rep.converged = pic.converged;
  rep.contracted = pic.ratios.empty()
                       ? pic.converged
                       : *std::max_element(pic.ratios.begin(),
                                           pic.ratios.end()) < 1.0;

  StepperConfig st = cfg.stepper;
  st.t_end = T;
  st.dt = std::min(cfg.stepper.dt, T / 4.0);
  st.snapshot_every = 1000000;
  st.keep_snapshots = true;
  TimeSeries series = run(u0, v0, w0, cfg.params, st, cfg.seed);
  if (series.aborted || series.snapshots.empty()) {
    throw std::runtime_error("picard_crosscheck: evolution run failed");
  }
  const State& fin = series.snapshots.back();

  auto rel_l2 = [](const Field& a, const Field& b) {
    const double nb = lp_norm(b, 2.0);
    const double diff = lp_norm(a - b, 2.0);
    return nb > 0.0 ? diff / nb : diff;
  };
  const std::size_t m = pic.fixed_point.m;
  rep.diff_u = rel_l2(pic.fixed_point.u[m], fin.u);
  rep.diff_v = rel_l2(pic.fixed_point.v[m], fin.v);
  rep.diff_w = rel_l2(pic.fixed_point.w[m], fin.w);
  return rep;
}

void write_series_csv(const std::string& path, const TimeSeries& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "t,mass_u,entropy,F_lyap,D_diss,L_energy,D1_diss,sup_u,"
         "residual_to_date\n";
  std::vector<double> residual(series.records.size(), 0.0);
  if (series.records.size() >= 3) {
    residual = lyapunov_identity_residual(series);
  }
  for (std::size_t i = 0; i < series.records.size(); ++i) {
    const Diagnostics& d = series.records[i].diag;
    out << format_double(series.records[i].t) << ','
        << format_double(d.mass_u) << ',' << format_double(d.entropy) << ','
        << format_double(d.F_lyap) << ',' << format_double(d.D_diss) << ','
        << format_double(d.L_energy) << ',' << format_double(d.D1_diss) << ','
        << format_double(d.sup_u) << ',' << format_double(residual[i]) << '\n';
  }
}

namespace {

std::string hash_hex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

void write_json(const std::string& path, const ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

ordered_json fit_to_json(const BoundLFit& fit) {
  return ordered_json{{"C1_hat", fit.C1_hat},
                      {"C2_hat", fit.C2_hat},
                      {"violation_fraction", fit.violation_fraction},
                      {"conforming", fit.conforming}};
}

}  // namespace

int run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();
  fs::create_directories(cfg.output_dir);
  const std::string dir = cfg.output_dir + "/";

  ordered_json summary;
  summary["schema_version"] = 1;
  summary["experiment"] = experiment_name(cfg.experiment);
  summary["config_hash"] = hash_hex(config_hash(cfg));
  summary["seed"] = cfg.seed;

  int exit_code = 0;
  try {
    switch (cfg.experiment) {
      case ExperimentType::SingleRun: {
        TimeSeries series = run_single(cfg, cfg.resolved_init_mass());
        write_series_csv(dir + "series.csv", series);
        double drift = 0.0;
        const double m0 = series.records.front().diag.mass_u;
        for (const auto& r : series.records) {
          drift = std::max(drift, std::abs(r.diag.mass_u - m0));
        }
        if (series.records.size() >= 8) {
          const BlowupReport rep = blowup_indicator(series);
          summary["verdict"] = verdict_name(rep.verdict);
          summary["peak_growth"] = rep.peak_growth;
        } else {
          summary["verdict"] = "insufficient-records";
        }
        summary["records"] = series.records.size();
        summary["steps"] = series.steps_taken;
        summary["mass_drift_rel"] = m0 > 0.0 ? drift / m0 : drift;
        summary["clipped_mass_total"] = series.clipped_mass_total;
        summary["aborted"] = series.aborted;
        if (series.aborted) {
          summary["abort_time"] = series.abort_time;
          summary["abort_reason"] = series.abort_reason;
        }
        if (series.records.size() >= 3) {
          summary["final_residual"] =
              lyapunov_identity_residual(series).back();
        }
        if (series.records.size() >= 16 && cfg.params.decay_positive()) {
          summary["bound_L_fit"] = fit_to_json(bound_L_inequality_fit(series));
        }
        break;
      }
      case ExperimentType::MassSweep: {
        const auto rows = mass_sweep(cfg, cfg.sweep_masses);
        std::ofstream out(dir + "sweep.csv", std::ios::binary);
        out << "mass,below_M_bounded,below_M_global,verdict,peak_growth,"
               "final_sup_u,max_L_energy,C1_hat,C2_hat,violation_fraction,"
               "conforming,failed,error\n";
        ordered_json verdicts = ordered_json::array();
        std::size_t failed = 0;
        for (const auto& r : rows) {
          out << format_double(r.mass) << ',' << r.below_M_bounded << ','
              << r.below_M_global << ',' << r.verdict << ','
              << format_double(r.peak_growth) << ','
              << format_double(r.final_sup_u) << ','
              << format_double(r.max_L_energy) << ','
              << format_double(r.fit.C1_hat) << ','
              << format_double(r.fit.C2_hat) << ','
              << format_double(r.fit.violation_fraction) << ','
              << r.fit.conforming << ',' << r.failed << ',' << r.error
              << '\n';
          verdicts.push_back(r.failed ? std::string("failed") : r.verdict);
          if (r.failed) ++failed;
        }
        summary["verdicts"] = verdicts;
        summary["rows_failed"] = failed;
        break;
      }
      case ExperimentType::InequalitySuite: {
        const auto rows = inequality_suite(cfg, cfg.ineq_witnesses);
        std::ofstream out(dir + "inequalities.csv", std::ios::binary);
        out << "witness_index,check,lhs,rhs,margin,slack,passed,witness\n";
        std::size_t failures = 0;
        double min_margin = std::numeric_limits<double>::infinity();
        std::string worst;
        for (const auto& r : rows) {
          out << r.witness_index << ',' << r.check << ','
              << format_double(r.lhs) << ',' << format_double(r.rhs) << ','
              << format_double(r.margin) << ',' << format_double(r.slack)
              << ',' << r.passed << ',' << r.witness << '\n';
          if (!r.passed) ++failures;
          if (r.margin < min_margin) {
            min_margin = r.margin;
            worst = r.check;
          }
        }
        summary["rows"] = rows.size();
        summary["failures"] = failures;
        summary["min_margin"] = min_margin;
        summary["min_margin_check"] = worst;
        if (failures > 0) exit_code = 1;
        break;
      }
      case ExperimentType::PicardCrosscheck: {
        const CrosscheckReport rep = picard_crosscheck(cfg, cfg.crosscheck_T);
        summary["T"] = rep.T;
        summary["diff_u"] = rep.diff_u;
        summary["diff_v"] = rep.diff_v;
        summary["diff_w"] = rep.diff_w;
        summary["ratios"] = rep.ratios;
        summary["contracted"] = rep.contracted;
        summary["converged"] = rep.converged;
        if (!rep.contracted) exit_code = 1;
        break;
      }
    }
    summary["status"] = exit_code == 0 ? "ok" : "failed";
  } catch (const std::exception& e) {
    summary["status"] = "error";
    summary["error"] = e.what();
    summary["partial"] = true;
    exit_code = 1;
  }

  const auto t_end = std::chrono::steady_clock::now();
  summary["wall_time_s"] =
      std::chrono::duration<double>(t_end - t_start).count();
  write_json(dir + "summary.json", summary);
  return exit_code;
}

}  // namespace chemo4d
