#ifndef PPJUMP_FUNCTIONALS_HPP
#define PPJUMP_FUNCTIONALS_HPP

#include <utility>
#include <vector>

#include "ppjump/model_spec.hpp"

namespace ppjump {

/// Absolute tolerance for integrals that have no closed form.
inline constexpr double kQuadratureTolerance = 1e-9;

/// a_i(t) + sum over channel-2 atoms of mass * delta_i(t, z).
double alpha(const ModelSpec& spec, Species s, double t);

/// sigma_i^2/2 + sum_{channel 1} mass (gamma_i - ln(1 + gamma_i))
///             - sum_{channel 2} mass ln(1 + delta_i), all at time t.
double beta(const ModelSpec& spec, Species s, double t);

/// Net log-growth rate p_i(t) = a_i(t) - beta_i(t).
double net_growth(const ModelSpec& spec, Species s, double t);

/// An extremum of p over [0, inf).
///
/// When every function entering p for the species is constant, `exact` is set
/// and both fields hold the true value. Otherwise `certified` is a rigorous
/// bound built from per-term extrema (a lower bound for the infimum, an upper
/// bound for the supremum) and `sampled` is the extremum over a dense grid,
/// which is tighter but not guaranteed.
struct ExtremumEstimate {
  double certified = 0.0;
  double sampled = 0.0;
  bool exact = false;
};

ExtremumEstimate net_growth_inf(const ModelSpec& spec, Species s, double sample_horizon = 100.0,
                                int samples = 20001);
ExtremumEstimate net_growth_sup(const ModelSpec& spec, Species s, double sample_horizon = 100.0,
                                int samples = 20001);

/// Exact (closed form where available, adaptive quadrature otherwise)
/// integral of p over [t0, t1].
double integral_of_net_growth(const ModelSpec& spec, Species s, double t0, double t1);

struct TimeAverage {
  double estimate = 0.0;
  /// (horizon, average over [0, horizon]) at horizon / 2^k, ascending.
  std::vector<std::pair<double, double>> trace;
};

/// Finite-horizon surrogate for limsup (1/t) int_0^t p(s) ds.
/// Throws std::invalid_argument if horizon <= 0 or num_horizons < 1.
TimeAverage net_growth_average(const ModelSpec& spec, Species s, double horizon,
                               int num_horizons = 8);

}  // namespace ppjump

#endif  // PPJUMP_FUNCTIONALS_HPP
