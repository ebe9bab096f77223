#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qsync/config.hpp"
#include "qsync/dynamics.hpp"
#include "qsync/metrics.hpp"
#include "qsync/slmp.hpp"

namespace qsync {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitStrict = 2,
  kExitPhysicality = 3,
  kExitMismatch = 4,
};

struct CommandOptions {
  bool strict = false;  // analyze: fail when the sufficient conditions do not hold
  std::string out_dir;  // base directory for relative output paths
  std::optional<Index> n_max;
  bool convergence_check = false;  // rerun at n_max + 2 and report deviations
};

/// a{k}, x{k}, p{k}, n{k} per oscillator, pe{j} per TLS, then energy.
std::vector<NamedObservable> standard_observables(const SystemSpec& spec);

struct SimulationRun {
  Trajectory trajectory;
  std::optional<Real> aborted_at;
  std::string abort_reason;
};

/// Evolves the configured initial state over linspace(0, t_end, n_points).
/// A physicality violation is captured in the result, never thrown.
SimulationRun run_simulation(const ScenarioConfig& config);

/// CSV text: t, x{k}, n{k}, re_a{k}, im_a{k} per oscillator, pe{j} per TLS.
std::string trajectory_csv(const SimulationRun& run, Index n_oscillators, Index n_tls);

/// Flat "key = value" rendering of an analysis.
std::string format_slmp_report(const SlmpReport& report);

struct CompareOutcome {
  SimulationRun run;
  AsymptoticPrediction prediction;
  SyncEstimate estimate;
  AgreementReport agreement;
};

/// simulate + fit_sync + analytic_asymptote + compare for a two-mode config.
CompareOutcome run_compare(const ScenarioConfig& config);

int cmd_analyze(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out);
int cmd_simulate(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out);
int cmd_compare(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out);
int cmd_sweep(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out);

/// Loads the config, applies overrides, dispatches, and maps errors to exit
/// codes (diagnostics go to err).
int run_command(const std::string& command, const std::string& config_path, const CommandOptions& opts,
                std::ostream& out, std::ostream& err);

}  // namespace qsync
