#ifndef PPJUMP_ENSEMBLE_HPP
#define PPJUMP_ENSEMBLE_HPP

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "ppjump/model_spec.hpp"
#include "ppjump/path_simulation.hpp"

namespace ppjump {

struct EnsembleParams {
  std::size_t num_paths = 1000;
  SimParams sim;
  /// Observation times in [0, horizon]. The horizon is always appended if
  /// missing. A checkpoint between grid points observes the last grid point
  /// before it, so multiples of dt are exact.
  std::vector<double> checkpoints;
  /// Fraction of [0, horizon] at the end used for limsup/liminf surrogates.
  double tail_window = 0.5;
  std::vector<double> moment_orders{1.0, 2.0};
  std::vector<double> inverse_orders{0.5};
  std::vector<double> upper_levels;  // H values for P{x <= H}
  std::vector<double> lower_levels;  // h values for P{x >= h}
  double extinction_cutoff = 1e-3;
  double max_failure_fraction = 0.01;
  /// Worker threads; 0 means std::thread::hardware_concurrency(). Results do
  /// not depend on this.
  unsigned threads = 0;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

/// `count` checkpoints spread over (0, horizon], snapped to multiples of dt.
std::vector<double> uniform_checkpoints(double horizon, double dt, int count);

/// Per-path observations at each checkpoint, kept for completed paths in
/// path-index order, plus failure bookkeeping.
struct EnsembleSummary {
  EnsembleParams params;
  std::vector<double> checkpoints;
  std::size_t attempted = 0;
  std::size_t completed = 0;
  std::vector<std::uint64_t> failed_paths;
  std::string first_failure;
  /// False for the predator of a prey-only model; outputs skip absent species.
  std::array<bool, 2> present{true, true};

  std::array<Eigen::ArrayXXd, 2> state;         // (path, checkpoint) -> x_i(t)
  std::array<Eigen::ArrayXXd, 2> time_average;  // (path, checkpoint) -> (1/t) int_0^t x_i

  double failure_fraction() const;
  /// More than params.max_failure_fraction of the paths aborted.
  bool run_failed() const;
  /// Checkpoint index holding time t; throws std::out_of_range if absent.
  std::size_t checkpoint_index(double t) const;
  /// Checkpoints with t >= (1 - tail_window) * horizon.
  std::vector<std::size_t> tail_indices() const;
  std::size_t last() const { return checkpoints.size() - 1; }
};

/// Simulates params.num_paths paths on derived streams and stores their
/// checkpoint observations. Aborted paths are counted, not rethrown.
EnsembleSummary run_ensemble(const ModelSpec& spec, const EnsembleParams& params);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Sample mean with standard error sd / sqrt(n).
Estimate mean_estimate(const Eigen::ArrayXd& samples);
/// Linear-interpolation sample quantile, q in [0, 1].
double quantile(Eigen::ArrayXd samples, double q);

Estimate moment(const EnsembleSummary& s, Species sp, std::size_t k, double order);
Estimate inverse_moment(const EnsembleSummary& s, Species sp, std::size_t k, double theta);
Estimate time_average_mean(const EnsembleSummary& s, Species sp, std::size_t k);
double time_average_median(const EnsembleSummary& s, Species sp, std::size_t k);
double occupancy_below(const EnsembleSummary& s, Species sp, std::size_t k, double upper);
double occupancy_above(const EnsembleSummary& s, Species sp, std::size_t k, double lower);
/// |X| = sqrt(x_1^2 + x_2^2) per path at checkpoint k.
Eigen::ArrayXd norm_samples(const EnsembleSummary& s, std::size_t k);
double norm_exceedance(const EnsembleSummary& s, std::size_t k, double chi);
/// P{x_i(T) < cutoff} at the horizon.
double extinction_fraction(const EnsembleSummary& s, Species sp, double cutoff);
/// Supremum over tail checkpoints of E[x^order]; standard error taken at the argmax.
Estimate tail_sup_moment(const EnsembleSummary& s, Species sp, double order);
/// Same for E[(1/x)^theta].
Estimate tail_sup_inverse_moment(const EnsembleSummary& s, Species sp, double theta);

struct LogGrowth {
  double mean = 0.0;
  double std_error = 0.0;
  double p95 = 0.0;
  double p99 = 0.0;
};

/// Statistics of ln(x(t)) / t across paths; t must be a positive checkpoint.
LogGrowth log_growth_rate(const EnsembleSummary& s, Species sp, double t);

struct PermanenceResult {
  bool pass = false;
  /// min over tail checkpoints of P{x <= H} - (1 - eps); >= 0 on pass.
  double upper_margin = 0.0;
  /// min over tail checkpoints of P{x >= h} - (1 - eps).
  double lower_margin = 0.0;
};

PermanenceResult permanence_check(const EnsembleSummary& s, Species sp, double eps, double h,
                                  double H);

enum class PersistenceVerdict { NonPersistent, WeaklyPersistent, Inconclusive };
std::string to_string(PersistenceVerdict v);

struct PersistenceThresholds {
  double non_persistent = 1e-3;
  double weakly_persistent = 1e-2;
};

struct PersistenceResult {
  /// (t, ensemble mean of (1/t) int_0^t x) over the tail checkpoints.
  std::vector<std::pair<double, double>> trend;
  double time_avg_estimate = 0.0;
  PersistenceVerdict verdict = PersistenceVerdict::Inconclusive;
  /// Fraction of paths whose own time average at the horizon is >= the
  /// weak-persistence threshold / < the non-persistence threshold.
  double path_fraction_persistent = 0.0;
  double path_fraction_vanishing = 0.0;
};

/// NonPersistent when the tail trend is strictly decreasing and ends below
/// the non-persistence threshold; WeaklyPersistent when it stays at or above
/// the weak-persistence threshold; Inconclusive otherwise. Needs at least
/// three tail checkpoints (std::invalid_argument otherwise).
PersistenceResult persistence_in_mean(const EnsembleSummary& s, Species sp,
                                      PersistenceThresholds th = {});

struct Levels {
  double low = 0.0;
  double high = 0.0;
};

/// Pilot ensemble to horizon / 2 on a seed derived from params.sim.seed,
/// observed only at its horizon. Used to pick (h, H) and chi when they are
/// not given.
EnsembleSummary run_pilot(const ModelSpec& spec, const EnsembleParams& params);

/// (q_low, q_high) sample quantiles of x_i at checkpoint k.
Levels quantile_levels(const EnsembleSummary& s, Species sp, std::size_t k, double q_low = 0.01,
                       double q_high = 0.99);

nlohmann::json to_json(const EnsembleSummary& s);
/// One row per checkpoint x species x statistic: t,species,stat,param,value,stderr.
void write_csv(const EnsembleSummary& s, std::ostream& os);

}  // namespace ppjump

#endif  // PPJUMP_ENSEMBLE_HPP
