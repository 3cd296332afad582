#ifndef PPJUMP_PATH_SIMULATION_HPP
#define PPJUMP_PATH_SIMULATION_HPP

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppjump/model_spec.hpp"
#include "ppjump/rng.hpp"

namespace ppjump {

enum class Scheme { LogEuler, DirectEuler };

std::string to_string(Scheme s);

struct SimParams {
  double horizon = 1.0;
  double dt = 1e-3;
  std::uint64_t seed = 42;
  Scheme scheme = Scheme::LogEuler;

  /// Largest admissible base step.
  static constexpr double kMaxStep = 0.1;

  /// Throws std::invalid_argument unless 0 < dt <= horizon and dt <= kMaxStep.
  void validate() const;
  bool operator==(const SimParams&) const = default;
};

struct JumpEvent {
  double time = 0.0;
  int channel = 1;
  std::size_t atom = 0;
  /// Amplitudes at the event time; the density is multiplied by 1 + size.
  std::array<double, 2> relative_sizes{0.0, 0.0};
};

/// One trajectory on the jump-adapted grid (uniform steps of dt merged with
/// every event time). At an event time the stored state is post-jump.
struct PathRecord {
  std::vector<double> grid;
  Eigen::ArrayX2d x;                // row k = (x_1, x_2) at grid[k]
  std::vector<JumpEvent> jumps;     // in time order
  std::vector<std::int64_t> event;  // per grid point: index into jumps or -1
  std::uint64_t master_seed = 0;
  std::uint64_t path_index = 0;
  Scheme scheme = Scheme::LogEuler;

  /// State just before the event at grid point k (equals x.row(k) if none).
  Eigen::Array2d pre_jump(std::size_t k) const;
};

/// Log-state left the representable range (|ln x| > 700) or became NaN.
class PathOverflow : public std::runtime_error {
 public:
  PathOverflow(double t, int species, double log_state);
  double time;
  int species;
};

/// Direct scheme stepped to x_i <= 0.
class NonPositiveExcursion : public std::runtime_error {
 public:
  NonPositiveExcursion(double t, int species, double value);
  double time;
  int species;
};

/// Events of one channel on [0, horizon]: homogeneous Poisson times at rate
/// total_mass, atom k chosen with probability mass_k / total_mass, sizes
/// evaluated at the event time.
std::vector<JumpEvent> sample_jump_skeleton(const JumpChannel& channel, int channel_id,
                                            double horizon, RngStream& rng);

/// Jump-adapted Euler on the log densities. Positivity of the output is
/// structural. Throws PathOverflow.
PathRecord simulate_path_log_euler(const ModelSpec& spec, const SimParams& params,
                                   std::uint64_t path_index = 0);

/// Jump-adapted Euler-Maruyama directly on the densities; meant for
/// cross-checking the log scheme. Throws NonPositiveExcursion.
PathRecord simulate_path_direct(const ModelSpec& spec, const SimParams& params,
                                std::uint64_t path_index = 0);

/// Dispatches on params.scheme.
PathRecord simulate_path(const ModelSpec& spec, const SimParams& params,
                         std::uint64_t path_index = 0);

/// Columns t,x1,x2,is_jump,channel,atom with 17 significant digits.
void write_csv(const PathRecord& path, std::ostream& os);

/// Shortest form for integers, otherwise 17 significant digits.
std::string format_real(double v);

}  // namespace ppjump

#endif  // PPJUMP_PATH_SIMULATION_HPP
