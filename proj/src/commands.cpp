#include "qsync/commands.hpp"

#include <cmath>
#include <concepts>
#include <filesystem>
#include <limits>
#include <fstream>
#include <ostream>
#include <sstream>
#include <utility>

namespace qsync {
namespace {

class FlatReport {
 public:
  void add(const std::string& key, const std::string& value) { lines_.emplace_back(key, value); }
  void add(const std::string& key, const char* value) { add(key, std::string(value)); }
  void add(const std::string& key, Real value) { add(key, format_real(value)); }
  void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }
  template <std::integral T>
  void add(const std::string& key, T value) {
    add(key, std::to_string(value));
  }

  void add_vector(const std::string& key, const std::vector<Real>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_real(v[i]);
    add(key, s + "]");
  }

  std::string str() const {
    std::string out;
    for (const auto& [k, v] : lines_) out += k + " = " + v + "\n";
    return out;
  }

 private:
  std::vector<std::pair<std::string, std::string>> lines_;
};

std::filesystem::path resolve_output(const CommandOptions& opts, const std::string& configured,
                                     const std::string& fallback) {
  std::filesystem::path p = configured.empty() ? fallback : configured;
  if (p.is_relative() && !opts.out_dir.empty()) p = std::filesystem::path(opts.out_dir) / p;
  return p;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw Error("write failed for '" + path.string() + "'");
}

void add_stats(FlatReport& r, const SimulationRun& run) {
  const auto& s = run.trajectory.stats;
  r.add("status", run.aborted_at ? "aborted" : "completed");
  if (run.aborted_at) {
    r.add("aborted_at", *run.aborted_at);
    r.add("abort_reason", run.abort_reason);
  }
  r.add("rows", static_cast<long>(run.trajectory.times.size()));
  r.add("accepted_steps", s.accepted_steps);
  r.add("rejected_steps", s.rejected_steps);
  r.add("rhs_evaluations", s.rhs_evaluations);
  r.add("positivity_checks", s.positivity_checks);
  r.add("max_trace_error", s.max_trace_error);
  r.add("max_hermiticity_error", s.max_hermiticity_error);
  r.add("min_eigenvalue", s.min_eigenvalue);
  r.add("error_estimate", s.error_estimate);
  if (run.trajectory.final_state) {
    const auto& d = run.trajectory.final_state->diagnostics();
    r.add("final_trace_error", d.trace_error);
    r.add("final_hermiticity_error", d.hermiticity_error);
    r.add("final_min_eigenvalue", d.min_eigenvalue);
  }
}

ScenarioConfig with_nmax(ScenarioConfig c, Index n_max) {
  c.system.n_max = n_max;
  c.validate();
  return c;
}

// Largest |<O>_a - <O>_b| over every recorded observable and time.
Real max_deviation(const Trajectory& a, const Trajectory& b) {
  Real dev = 0.0;
  const std::size_t rows = std::min(a.records.size(), b.records.size());
  for (std::size_t t = 0; t < rows; ++t)
    for (std::size_t k = 0; k < a.keys.size(); ++k)
      dev = std::max(dev, std::abs(a.records[t][k] - b.records[t][b.key_index(a.keys[k])]));
  return dev;
}

void require_two_mode(const ScenarioConfig& c, const char* command) {
  if (!c.system.is_two_mode())
    throw ConfigError(std::string(command) + " needs two oscillators and one TLS", 0, "system");
}

void add_compare(FlatReport& r, const CompareOutcome& o) {
  const auto& p = o.prediction;
  const auto& e = o.estimate;
  const auto& a = o.agreement;
  r.add("result", a.pass ? "pass" : "fail");
  r.add("oscillating", e.oscillating);
  r.add("max_abs_signal", e.max_abs_signal);
  r.add("fit_t_start", e.t_start);
  r.add("fit_t_end", e.t_end);
  r.add("rotation_sign", static_cast<long>(e.rotation_sign));
  r.add("fit_residual", e.fit_residual);
  r.add("omega_predicted", p.omega_sync);
  r.add("omega_fit", e.omega_fit);
  r.add("frequency_rel_error", a.frequency_rel_error);
  r.add("frequency_pass", a.frequency_pass);
  r.add("phase_diff_predicted", p.phase_diff);
  r.add("phase_diff_fit", e.phase_diff);
  r.add("phase_error", a.phase_error);
  r.add("phase_pass", a.phase_pass);
  for (int k = 0; k < 2; ++k) {
    const std::string n = std::to_string(k + 1);
    r.add("amplitude" + n + "_predicted", kPositionScale * std::abs(p.amp[k]));
    r.add("amplitude" + n + "_fit", e.oscillating ? e.oscillators[k].amplitude : 0.0);
    r.add("amplitude" + n + "_error", a.amplitude_errors[k]);
  }
  r.add("amplitude_errors_absolute", a.amplitude_errors_absolute);
  r.add("amplitude_pass", a.amplitude_pass);
  r.add("no_oscillation", a.no_oscillation);
}

}  // namespace

std::vector<NamedObservable> standard_observables(const SystemSpec& spec) {
  const SpaceLayout layout = spec.layout();
  const Index dim = spec.n_max + 1;
  std::vector<NamedObservable> obs;
  for (Index k = 0; k < spec.num_oscillators(); ++k) {
    const std::string n = std::to_string(k + 1);
    const QOperator a = embed(annihilation(dim), layout, spec.oscillator_slot(k));
    const QOperator ad = a.adjoint();
    obs.push_back({"a" + n, a});
    obs.push_back({"x" + n, Complex(1.0 / kPositionScale) * (a + ad)});
    obs.push_back({"p" + n, Complex(0.0, -1.0 / kPositionScale) * (a - ad)});
    obs.push_back({"n" + n, embed(number(dim), layout, spec.oscillator_slot(k))});
  }
  for (Index j = 0; j < spec.num_tls(); ++j) {
    const QOperator sz = embed(pauli(Pauli::z), layout, spec.tls_slot(j));
    obs.push_back({"pe" + std::to_string(j + 1), Complex(0.5) * (identity(layout) + sz)});
  }
  obs.push_back({"energy", build_hamiltonian(spec)});
  return obs;
}

SimulationRun run_simulation(const ScenarioConfig& config) {
  const LindbladGenerator gen = build_lindblad(config.system);
  const DensityState rho0 = prepare_state(config.system.layout(), config.initial_state);
  const std::vector<Real> grid = linspace(0.0, config.t_end, config.n_points);
  const auto obs = standard_observables(config.system);
  SimulationRun run;
  try {
    run.trajectory = evolve(gen, rho0, grid, obs, config.solver);
  } catch (const PhysicalityViolation& v) {
    run.trajectory = v.partial();
    run.aborted_at = v.time();
    run.abort_reason = v.what();
  }
  return run;
}

std::string trajectory_csv(const SimulationRun& run, Index n_oscillators, Index n_tls) {
  const Trajectory& tr = run.trajectory;
  std::vector<std::pair<std::size_t, int>> columns;  // key index, 0 real / 1 imag
  std::string out = "t";
  for (Index k = 1; k <= n_oscillators; ++k) {
    const std::string n = std::to_string(k);
    out += ",x" + n + ",n" + n + ",re_a" + n + ",im_a" + n;
    columns.emplace_back(tr.key_index("x" + n), 0);
    columns.emplace_back(tr.key_index("n" + n), 0);
    columns.emplace_back(tr.key_index("a" + n), 0);
    columns.emplace_back(tr.key_index("a" + n), 1);
  }
  for (Index j = 1; j <= n_tls; ++j) {
    out += ",pe" + std::to_string(j);
    columns.emplace_back(tr.key_index("pe" + std::to_string(j)), 0);
  }
  out += "\n";
  for (std::size_t t = 0; t < tr.records.size(); ++t) {
    out += format_real(tr.times[t]);
    for (const auto& [idx, part] : columns) {
      const Complex v = tr.records[t][idx];
      out += "," + format_real(part == 0 ? v.real() : v.imag());
    }
    out += "\n";
  }
  if (run.aborted_at) out += "# ABORTED t=" + format_real(*run.aborted_at) + "\n";
  return out;
}

std::string format_slmp_report(const SlmpReport& report) {
  FlatReport r;
  r.add("two_mode", report.two_mode.has_value());
  if (report.two_mode) {
    const auto& p = *report.two_mode;
    r.add("gamma_angle", p.gamma_angle);
    r.add("omega_tilde1", p.omega_tilde[0]);
    r.add("omega_tilde2", p.omega_tilde[1]);
    r.add("g_tilde1", p.g_tilde[0]);
    r.add("g_tilde2", p.g_tilde[1]);
    r.add("xi12", p.xi12);
    r.add("eta", p.eta);
  }
  if (report.conditions) {
    const auto& c = *report.conditions;
    r.add("condition_threshold", c.threshold);
    r.add("r1_detuning_vs_coupling", c.ratios.detuning_vs_coupling);
    r.add("r2_tunnelling_vs_decay", c.ratios.tunnelling_vs_decay);
    r.add("r3_rwa_parameter", c.ratios.rwa_parameter);
    r.add("r1_ok", c.verdicts.detuning_vs_coupling);
    r.add("r2_ok", c.verdicts.tunnelling_vs_decay);
    r.add("r3_ok", c.verdicts.rwa_parameter);
    r.add("conditions_sufficient", c.verdicts.sufficient);
  }
  const auto& m = report.modes;
  r.add("preserved_count", static_cast<long>(m.preserved.size()));
  r.add("leaking_count", static_cast<long>(m.leaking.size()));
  auto add_modes = [&](const std::string& prefix, const std::vector<CVector>& modes) {
    for (std::size_t i = 0; i < modes.size(); ++i) {
      std::vector<Real> re, im;
      for (Index c = 0; c < modes[i].size(); ++c) {
        re.push_back(modes[i](c).real());
        im.push_back(modes[i](c).imag());
      }
      r.add_vector(prefix + std::to_string(i + 1) + "_re", re);
      r.add_vector(prefix + std::to_string(i + 1) + "_im", im);
    }
  };
  add_modes("preserved", m.preserved);
  add_modes("leaking", m.leaking);
  r.add_vector("surviving_frequencies", m.surviving_frequencies);
  r.add("surviving_frequency_spread", m.frequency_spread());
  return r.str();
}

CompareOutcome run_compare(const ScenarioConfig& config) {
  require_two_mode(config, "compare");
  CompareOutcome o;
  o.run = run_simulation(config);
  const Trajectory& tr = o.run.trajectory;
  if (o.run.aborted_at) return o;
  const Complex a1_0 = tr.records.front()[tr.key_index("a1")];
  const Complex a2_0 = tr.records.front()[tr.key_index("a2")];
  o.prediction = analytic_asymptote(config.system, a1_0, a2_0);
  FitOptions fit;
  fit.window_fraction = config.window_fraction;
  fit.min_amplitude = config.tolerances.amplitude_abs;
  fit.quadrature_keys = std::array<std::string, 2>{"p1", "p2"};
  o.estimate = fit_sync(tr, {"x1", "x2"}, fit);
  o.agreement = compare(o.prediction, o.estimate, config.tolerances);
  return o;
}

int cmd_analyze(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out) {
  const SlmpReport report = analyze(config.system, config.condition_threshold);
  const std::string text = "scenario = " + config.name + "\n" + format_slmp_report(report);
  out << text;
  write_file(resolve_output(opts, config.report_path, config.name + "_analyze.txt"), text);
  if (opts.strict && report.conditions && !report.conditions->verdicts.sufficient) return kExitStrict;
  return kExitOk;
}

int cmd_simulate(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out) {
  const SimulationRun run = run_simulation(config);
  const auto csv_path = resolve_output(opts, config.csv_path, config.name + ".csv");
  write_file(csv_path, trajectory_csv(run, config.system.num_oscillators(), config.system.num_tls()));

  FlatReport r;
  r.add("scenario", config.name);
  r.add("n_max", config.system.n_max);
  r.add("dimension", config.system.layout().dimension());
  r.add("csv_path", csv_path.string());
  add_stats(r, run);
  if (opts.convergence_check && !run.aborted_at) {
    const SimulationRun fine = run_simulation(with_nmax(config, config.system.n_max + 2));
    r.add("convergence_n_max", config.system.n_max + 2);
    if (fine.aborted_at) {
      r.add("convergence_status", "aborted");
    } else {
      r.add("convergence_status", "completed");
      r.add("convergence_max_deviation", max_deviation(run.trajectory, fine.trajectory));
    }
  }
  const std::string text = r.str();
  out << text;
  write_file(resolve_output(opts, config.report_path, config.name + "_simulate.txt"), text);
  return run.aborted_at ? kExitPhysicality : kExitOk;
}

int cmd_compare(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out) {
  const CompareOutcome o = run_compare(config);
  FlatReport r;
  r.add("scenario", config.name);
  r.add("n_max", config.system.n_max);
  add_stats(r, o.run);
  if (!o.run.aborted_at) add_compare(r, o);
  if (opts.convergence_check && !o.run.aborted_at) {
    const CompareOutcome fine = run_compare(with_nmax(config, config.system.n_max + 2));
    r.add("convergence_n_max", config.system.n_max + 2);
    if (fine.run.aborted_at) {
      r.add("convergence_status", "aborted");
    } else {
      r.add("convergence_status", "completed");
      r.add("convergence_max_deviation", max_deviation(o.run.trajectory, fine.run.trajectory));
      r.add("convergence_omega_fit_change", std::abs(fine.estimate.omega_fit - o.estimate.omega_fit));
      r.add("convergence_phase_diff_change", phase_distance(fine.estimate.phase_diff, o.estimate.phase_diff));
    }
  }
  const std::string text = r.str();
  out << text;
  write_file(resolve_output(opts, config.report_path, config.name + "_compare.txt"), text);
  if (o.run.aborted_at) return kExitPhysicality;
  return o.agreement.pass ? kExitOk : kExitMismatch;
}

int cmd_sweep(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out) {
  if (!config.sweep) throw ConfigError("sweep command needs a [sweep] section", 0, "sweep");
  require_two_mode(config, "sweep");
  const SweepSettings& sweep = *config.sweep;
  if (!is_sweep_field(sweep.field)) throw ConfigError("unknown sweep field '" + sweep.field + "'", 0, "sweep.field");

  // Rows are independent copies of the base config, evaluated in axis order.
  std::string csv = sweep.field + ",r1,r2,r3,gamma_angle,omega_fit,phase_diff,pass\n";
  bool any_aborted = false;
  long passed = 0;
  for (Real value : sweep.values) {
    ScenarioConfig row = config;
    apply_sweep_value(row, sweep.field, value);
    const ConditionCheck cond = check_conditions(row.system, row.condition_threshold);
    const TwoModeParams params = transform_params(row.system);
    const CompareOutcome o = run_compare(row);
    const bool aborted = o.run.aborted_at.has_value();
    any_aborted = any_aborted || aborted;
    const bool pass = !aborted && o.agreement.pass;
    passed += pass ? 1 : 0;
    const Real nan = std::numeric_limits<Real>::quiet_NaN();
    csv += format_real(value) + "," + format_real(cond.ratios.detuning_vs_coupling) + "," +
           format_real(cond.ratios.tunnelling_vs_decay) + "," + format_real(cond.ratios.rwa_parameter) + "," +
           format_real(params.gamma_angle) + "," + format_real(aborted ? nan : o.estimate.omega_fit) + "," +
           format_real(aborted ? nan : o.estimate.phase_diff) + "," + (pass ? "1" : "0") + "\n";
  }
  const auto csv_path = resolve_output(opts, config.csv_path, config.name + "_sweep.csv");
  write_file(csv_path, csv);

  FlatReport r;
  r.add("scenario", config.name);
  r.add("sweep_field", sweep.field);
  r.add("rows", static_cast<long>(sweep.values.size()));
  r.add("rows_passed", passed);
  r.add("any_aborted", any_aborted);
  r.add("csv_path", csv_path.string());
  const std::string text = r.str();
  out << text;
  write_file(resolve_output(opts, config.report_path, config.name + "_sweep.txt"), text);
  return any_aborted ? kExitPhysicality : kExitOk;
}

int run_command(const std::string& command, const std::string& config_path, const CommandOptions& opts,
                std::ostream& out, std::ostream& err) {
  try {
    ScenarioConfig config = load_config(config_path);
    if (opts.n_max) config = with_nmax(std::move(config), *opts.n_max);
    if (command == "analyze") return cmd_analyze(config, opts, out);
    if (command == "simulate") return cmd_simulate(config, opts, out);
    if (command == "compare") return cmd_compare(config, opts, out);
    if (command == "sweep") return cmd_sweep(config, opts, out);
    err << "unknown command '" << command << "'\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace qsync
