#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qsync/dynamics.hpp"
#include "qsync/errors.hpp"
#include "qsync/metrics.hpp"
#include "qsync/model.hpp"

namespace qsync {

class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, int line = 0, std::string field = {});

  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

enum class ModelKind { general, chain };

struct SweepSettings {
  std::string field;
  std::vector<Real> values;
};

/// One runnable scenario. See docs/config.md for the file grammar.
struct ScenarioConfig {
  std::string name = "scenario";
  ModelKind model = ModelKind::general;
  SystemSpec system;
  std::vector<Real> chain_g;  // model == chain only
  InitialState initial_state;
  Real t_end = 400.0;
  std::size_t n_points = 4000;
  SolverOptions solver;
  Real window_fraction = 0.25;
  Tolerances tolerances;
  Real condition_threshold = 0.5;
  std::string csv_path;
  std::string report_path;
  std::optional<SweepSettings> sweep;

  void validate() const;
};

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);
std::string serialize_config(const ScenarioConfig& config);

/// Names accepted by apply_sweep_value: omega0, gamma_decay, n_max,
/// omega<k>, g<k>, theta<k> (k is 1-based; g and theta address TLS 1).
bool is_sweep_field(const std::string& field);
void apply_sweep_value(ScenarioConfig& config, const std::string& field, Real value);

/// Shortest round-trip decimal form (17 significant digits, '.' separator).
std::string format_real(Real value);

}  // namespace qsync
