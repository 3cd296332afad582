#ifndef PPJUMP_CONFIG_HPP
#define PPJUMP_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ppjump/ensemble.hpp"
#include "ppjump/model_spec.hpp"
#include "ppjump/path_simulation.hpp"
#include "ppjump/regime.hpp"

namespace ppjump {

inline constexpr int kSchemaVersion = 1;

struct EnsembleSettings {
  std::size_t num_paths = 1000;
  std::vector<double> checkpoints;  // empty: num_checkpoints uniform points
  int num_checkpoints = 16;
  double tail_window = 0.5;
  double extinction_cutoff = 1e-3;
  double max_failure_fraction = 0.01;
  bool operator==(const EnsembleSettings&) const = default;
};

struct AnalysisSettings {
  std::optional<double> horizon;  // defaults to sim.horizon
  std::optional<double> tolerance_band;
  int num_horizons = 8;
  std::vector<double> theta_list{0.5};
  std::vector<double> p_list{1.0, 2.0};
  std::optional<double> h;
  std::optional<double> H;
  double epsilon = 0.05;
  double delta_np = 1e-3;
  double delta_wp = 1e-2;
  double min_extinct_fraction = 0.99;
  bool operator==(const AnalysisSettings&) const = default;
};

struct OutputSettings {
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "json"};
  std::size_t max_saved_paths = 10;
  bool operator==(const OutputSettings&) const = default;
};

struct ScenarioFlags {
  bool allow_degenerate = false;
  bool prey_only = false;
  bool operator==(const ScenarioFlags&) const = default;
};

struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  std::string name;
  ModelSpec model;
  SimParams sim;
  EnsembleSettings ensemble;
  AnalysisSettings analysis;
  OutputSettings output;
  ScenarioFlags flags;

  EnsembleParams ensemble_params(unsigned threads = 0) const;
  AnalysisParams analysis_params() const;
  bool wants(std::string_view format) const;

  bool operator==(const ScenarioConfig&) const = default;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnreadableConfig : public ConfigError {
 public:
  explicit UnreadableConfig(const std::string& path)
      : ConfigError("cannot read config file: " + path) {}
};

class SchemaViolation : public ConfigError {
 public:
  SchemaViolation(std::string field, const std::string& message)
      : ConfigError("schema violation at " + field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct LoadOptions {
  /// Skip the standing-assumption check even if the file does not ask to.
  bool force_allow_degenerate = false;
};

/// Parses config text, checks the schema, then the model assumptions unless
/// degenerate specs are allowed. Throws SchemaViolation or
/// AssumptionViolation.
ScenarioConfig parse_config(std::string_view text, const LoadOptions& options = {});

/// parse_config on the file contents; throws UnreadableConfig if the file
/// cannot be opened.
ScenarioConfig load_config(const std::filesystem::path& path, const LoadOptions& options = {});

/// Canonical text form; parse_config(emit_config(c)) == c.
std::string emit_config(const ScenarioConfig& config);

/// Parses a single time-function value, e.g. "sinusoid(0.5, 0.1, 1, 0)".
TimeFunction parse_time_function(std::string_view text);
std::string emit_time_function(const TimeFunction& f);

}  // namespace ppjump

#endif  // PPJUMP_CONFIG_HPP
