#include "ppjump/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ppjump/quadrature.hpp"

namespace ppjump {

namespace {

// gamma - ln(1 + gamma): convex, zero at gamma = 0.
double gamma_excess(double g) { return g - std::log1p(g); }

Bounds gamma_excess_bounds(const TimeFunction& f) {
  Bounds b = f.bounds();
  double lo = gamma_excess(b.inf), hi = gamma_excess(b.sup);
  double inf = (b.inf <= 0.0 && b.sup >= 0.0) ? 0.0 : std::min(lo, hi);
  return {inf, std::max(lo, hi)};
}

// Integral of ln(1 + f(t)) over [t0, t1].
double integral_of_log1p(const TimeFunction& f, double t0, double t1) {
  if (f.is_constant()) return std::log1p(f(t0)) * (t1 - t0);
  std::vector<double> cuts = f.breakpoints(t0, t1);
  cuts.insert(cuts.begin(), t0);
  cuts.push_back(t1);
  const double span = t1 - t0;
  double acc = 0.0;
  auto integrand = [&f](double t) { return std::log1p(f(t)); };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double tol = kQuadratureTolerance * (cuts[i + 1] - cuts[i]) / span;
    acc += integrate_adaptive(integrand, cuts[i], cuts[i + 1], tol);
  }
  return acc;
}

bool net_growth_is_constant(const ModelSpec& spec, Species s) {
  const std::size_t i = index(s);
  if (!spec.a[i].is_constant() || !spec.sigma[i].is_constant()) return false;
  for (const JumpChannel* ch : {&spec.channel1, &spec.channel2}) {
    for (const TimeFunction& f : ch->amplitude[i]) {
      if (!f.is_constant()) return false;
    }
  }
  return true;
}

// Certified range of beta from per-term extrema.
Bounds beta_bounds(const ModelSpec& spec, Species s) {
  const std::size_t i = index(s);
  Bounds sq = square_bounds(spec.sigma[i]);
  Bounds out{0.5 * sq.inf, 0.5 * sq.sup};
  const auto& atoms1 = spec.channel1.measure.atoms();
  for (std::size_t k = 0; k < atoms1.size(); ++k) {
    Bounds g = gamma_excess_bounds(spec.channel1.amplitude[i][k]);
    out.inf += atoms1[k].mass * g.inf;
    out.sup += atoms1[k].mass * g.sup;
  }
  const auto& atoms2 = spec.channel2.measure.atoms();
  for (std::size_t k = 0; k < atoms2.size(); ++k) {
    Bounds d = spec.channel2.amplitude[i][k].bounds();
    out.inf -= atoms2[k].mass * std::log1p(d.sup);
    out.sup -= atoms2[k].mass * std::log1p(d.inf);
  }
  return out;
}

template <class Better>
double sampled_extremum(const ModelSpec& spec, Species s, double horizon, int samples,
                        double start, Better better) {
  double best = start;
  const double step = horizon / std::max(1, samples - 1);
  for (int k = 0; k < samples; ++k) {
    double v = net_growth(spec, s, k * step);
    if (better(v, best)) best = v;
  }
  return best;
}

}  // namespace

double alpha(const ModelSpec& spec, Species s, double t) {
  const std::size_t i = index(s);
  double out = spec.a[i](t);
  const auto& atoms = spec.channel2.measure.atoms();
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    out += atoms[k].mass * spec.channel2.amplitude[i][k](t);
  }
  return out;
}

double beta(const ModelSpec& spec, Species s, double t) {
  const std::size_t i = index(s);
  double sig = spec.sigma[i](t);
  double out = 0.5 * sig * sig;
  const auto& atoms1 = spec.channel1.measure.atoms();
  for (std::size_t k = 0; k < atoms1.size(); ++k) {
    out += atoms1[k].mass * gamma_excess(spec.channel1.amplitude[i][k](t));
  }
  const auto& atoms2 = spec.channel2.measure.atoms();
  for (std::size_t k = 0; k < atoms2.size(); ++k) {
    out -= atoms2[k].mass * std::log1p(spec.channel2.amplitude[i][k](t));
  }
  return out;
}

double net_growth(const ModelSpec& spec, Species s, double t) {
  return spec.a[index(s)](t) - beta(spec, s, t);
}

ExtremumEstimate net_growth_inf(const ModelSpec& spec, Species s, double sample_horizon,
                                int samples) {
  if (net_growth_is_constant(spec, s)) {
    double v = net_growth(spec, s, 0.0);
    return {v, v, true};
  }
  double certified = spec.a[index(s)].bounds().inf - beta_bounds(spec, s).sup;
  double sampled = sampled_extremum(spec, s, sample_horizon, samples,
                                    std::numeric_limits<double>::infinity(), std::less<>{});
  return {certified, sampled, false};
}

ExtremumEstimate net_growth_sup(const ModelSpec& spec, Species s, double sample_horizon,
                                int samples) {
  if (net_growth_is_constant(spec, s)) {
    double v = net_growth(spec, s, 0.0);
    return {v, v, true};
  }
  double certified = spec.a[index(s)].bounds().sup - beta_bounds(spec, s).inf;
  double sampled = sampled_extremum(spec, s, sample_horizon, samples,
                                    -std::numeric_limits<double>::infinity(), std::greater<>{});
  return {certified, sampled, false};
}

double integral_of_net_growth(const ModelSpec& spec, Species s, double t0, double t1) {
  const std::size_t i = index(s);
  double acc = integral(spec.a[i], t0, t1) - 0.5 * integral_of_square(spec.sigma[i], t0, t1);
  const auto& atoms1 = spec.channel1.measure.atoms();
  for (std::size_t k = 0; k < atoms1.size(); ++k) {
    const TimeFunction& g = spec.channel1.amplitude[i][k];
    acc -= atoms1[k].mass * (integral(g, t0, t1) - integral_of_log1p(g, t0, t1));
  }
  const auto& atoms2 = spec.channel2.measure.atoms();
  for (std::size_t k = 0; k < atoms2.size(); ++k) {
    acc += atoms2[k].mass * integral_of_log1p(spec.channel2.amplitude[i][k], t0, t1);
  }
  return acc;
}

TimeAverage net_growth_average(const ModelSpec& spec, Species s, double horizon, int num_horizons) {
  if (!(horizon > 0.0)) throw std::invalid_argument("net growth average: horizon must be > 0");
  if (num_horizons < 1) throw std::invalid_argument("net growth average: need >= 1 horizon");
  TimeAverage out;
  // Accumulate dyadic pieces from the shortest horizon upwards so every
  // trace entry reuses the integral of the previous one.
  double h = std::ldexp(horizon, -(num_horizons - 1));
  double acc = integral_of_net_growth(spec, s, 0.0, h);
  out.trace.emplace_back(h, acc / h);
  for (int k = 1; k < num_horizons; ++k) {
    acc += integral_of_net_growth(spec, s, h, 2.0 * h);
    h *= 2.0;
    out.trace.emplace_back(h, acc / h);
  }
  out.estimate = out.trace.back().second;
  return out;
}

}  // namespace ppjump
