// Shared stepping loop for the path simulators and the ensemble runner.
#ifndef PPJUMP_SRC_PATH_ENGINE_HPP
#define PPJUMP_SRC_PATH_ENGINE_HPP

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "ppjump/path_simulation.hpp"

namespace ppjump::detail {

inline constexpr double kLogStateLimit = 700.0;

struct Coefficients {
  Eigen::Array2d a, c, sigma;
  // Sum over channel-1 atoms of mass * gamma_i(t): the compensator of the
  // centered driver, removed from the drift because jumps are applied raw.
  Eigen::Array2d compensator;
  double b1 = 0.0;
  double m = 1.0;

  void evaluate(const ModelSpec& spec, double t) {
    for (std::size_t i = 0; i < 2; ++i) {
      a[i] = spec.a[i](t);
      c[i] = spec.c[i](t);
      sigma[i] = spec.sigma[i](t);
      double comp = 0.0;
      const auto& atoms = spec.channel1.measure.atoms();
      for (std::size_t k = 0; k < atoms.size(); ++k) {
        comp += atoms[k].mass * spec.channel1.amplitude[i][k](t);
      }
      compensator[i] = comp;
    }
    b1 = spec.b1(t);
    m = spec.m(t);
  }
};

inline std::vector<JumpEvent> merged_skeleton(const ModelSpec& spec, double horizon,
                                              RngStream& rng) {
  std::vector<JumpEvent> e1 = sample_jump_skeleton(spec.channel1, 1, horizon, rng);
  std::vector<JumpEvent> e2 = sample_jump_skeleton(spec.channel2, 2, horizon, rng);
  std::vector<JumpEvent> out;
  out.reserve(e1.size() + e2.size());
  std::merge(e1.begin(), e1.end(), e2.begin(), e2.end(), std::back_inserter(out),
             [](const JumpEvent& x, const JumpEvent& y) { return x.time < y.time; });
  return out;
}

inline std::size_t uniform_step_count(const SimParams& p) {
  return static_cast<std::size_t>(std::ceil(p.horizon / p.dt * (1.0 - 1e-12)));
}

/// Runs one path and reports every grid point to `obs`:
///   obs.start(x0, expected_points, events)
///   obs.point(t, pre, post, event_index)   // event_index < 0 if no jump
/// Time-varying coefficients are frozen at the left end of each substep.
template <Scheme S, class Observer>
void integrate_path(const ModelSpec& spec, const SimParams& params, RngStream& rng,
                    Observer& obs) {
  const double horizon = params.horizon;
  const std::vector<JumpEvent> events = merged_skeleton(spec, horizon, rng);
  const std::size_t n_uniform = uniform_step_count(params);
  const bool prey_only = spec.prey_only;
  const bool autonomous = spec.is_autonomous();

  Coefficients co;
  co.evaluate(spec, 0.0);

  Eigen::Array2d x(spec.x0[0], prey_only ? 0.0 : spec.x0[1]);
  Eigen::Array2d xi = x.log();
  obs.start(x, n_uniform + 1 + events.size(), events);

  double t = 0.0;
  std::size_t k = 1;   // next uniform index
  std::size_t e = 0;   // next event
  while (k <= n_uniform || e < events.size()) {
    double t_uniform = k < n_uniform ? static_cast<double>(k) * params.dt : horizon;
    if (k > n_uniform) t_uniform = horizon;
    const bool take_event = e < events.size() && events[e].time <= t_uniform;
    const double t_next = take_event ? events[e].time : t_uniform;
    const bool hits_uniform = k <= n_uniform && t_next == t_uniform;

    const double h = t_next - t;
    if (h > 0.0) {
      if (!autonomous) co.evaluate(spec, t);
      auto [z1, z2] = rng.normal_pair();
      const Eigen::Array2d z(z1, z2);
      const double sqrt_h = std::sqrt(h);
      const double inter = x[1] / (co.m + x[0]);
      Eigen::Array2d density_term(co.b1 * x[0] + co.c[0] * inter, co.c[1] * inter);
      if constexpr (S == Scheme::LogEuler) {
        Eigen::Array2d drift =
            co.a - 0.5 * co.sigma.square() - co.compensator - density_term;
        xi += drift * h + co.sigma * sqrt_h * z;
        for (int i = 0; i < (prey_only ? 1 : 2); ++i) {
          if (!(std::abs(xi[i]) <= kLogStateLimit)) throw PathOverflow(t_next, i + 1, xi[i]);
        }
        x[0] = std::exp(xi[0]);
        if (!prey_only) x[1] = std::exp(xi[1]);
      } else {
        Eigen::Array2d drift = co.a - co.compensator - density_term;
        Eigen::Array2d nx = x + x * (drift * h + co.sigma * sqrt_h * z);
        for (int i = 0; i < (prey_only ? 1 : 2); ++i) {
          if (!(nx[i] > 0.0) || !std::isfinite(nx[i])) throw NonPositiveExcursion(t_next, i + 1, nx[i]);
        }
        x = nx;
        if (prey_only) x[1] = 0.0;
      }
    }

    const Eigen::Array2d pre = x;
    std::int64_t ev_index = -1;
    if (take_event) {
      const JumpEvent& ev = events[e];
      for (int i = 0; i < (prey_only ? 1 : 2); ++i) {
        if constexpr (S == Scheme::LogEuler) {
          xi[i] += std::log1p(ev.relative_sizes[i]);
          if (!(std::abs(xi[i]) <= kLogStateLimit)) throw PathOverflow(t_next, i + 1, xi[i]);
          x[i] = std::exp(xi[i]);
        } else {
          x[i] *= 1.0 + ev.relative_sizes[i];
        }
      }
      ev_index = static_cast<std::int64_t>(e);
      ++e;
    }
    if (hits_uniform) ++k;
    t = t_next;
    obs.point(t, pre, x, ev_index);
  }
}

}  // namespace ppjump::detail

#endif  // PPJUMP_SRC_PATH_ENGINE_HPP
