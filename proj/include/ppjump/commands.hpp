#ifndef PPJUMP_COMMANDS_HPP
#define PPJUMP_COMMANDS_HPP

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "ppjump/config.hpp"
#include "ppjump/ensemble.hpp"
#include "ppjump/regime.hpp"

namespace ppjump {

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitInvalidInput = 2 };

struct RunContext {
  std::filesystem::path out_dir = "out";
  /// Ensemble worker threads; 0 means hardware concurrency.
  unsigned threads = 0;
  /// Human-readable progress and summary; nullptr for silence.
  std::ostream* console = nullptr;
};

/// Writes regime_report.json.
RegimeReport cmd_analyze(const ScenarioConfig& config, const RunContext& ctx);

struct SimulateResult {
  EnsembleSummary summary;
  std::size_t saved_paths = 0;
  int exit_code = kExitOk;
};

/// Writes paths/path_NNNNN.csv for the first max_saved_paths paths and
/// ensemble_summary.{json,csv} in the requested formats. Exit code 1 when the
/// path-failure fraction is over the limit.
SimulateResult cmd_simulate(const ScenarioConfig& config, const RunContext& ctx);

/// One empirical test of one predicted regime.
struct RegimeCheck {
  Regime regime = Regime::Indeterminate;
  bool compatible = true;
  /// Compatible only by the knife-edge allowance (Inconclusive evidence for a
  /// predicted non-persistence).
  bool warning = false;
  /// Signed distance to the decision threshold; >= 0 when the evidence is on
  /// the predicted side.
  double margin = 0.0;
  std::string evidence;
  nlohmann::json details;
};

struct SpeciesVerification {
  Species species = Species::prey;
  bool present = true;
  Regime predicted = Regime::Indeterminate;
  std::vector<Regime> implied;
  std::vector<RegimeCheck> checks;
  bool agreement = true;
};

struct VerifyOutcome {
  std::array<SpeciesVerification, 2> species;
  RegimeCheck boundedness;
  double failure_fraction = 0.0;
  bool run_failed = false;
  bool agreement = true;
  std::vector<std::string> warnings;

  int exit_code() const { return agreement && !run_failed ? kExitOk : kExitRuntime; }
};

/// Runs analyze and simulate, then tests every predicted and implied regime
/// against the ensemble. Writes verify.json next to the other outputs.
VerifyOutcome cmd_verify(const ScenarioConfig& config, const RunContext& ctx);

nlohmann::json to_json(const VerifyOutcome& outcome);

}  // namespace ppjump

#endif  // PPJUMP_COMMANDS_HPP
