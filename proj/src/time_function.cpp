#include "ppjump/time_function.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ppjump {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string("time function: non-finite ") + what);
  }
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool sinusoid_is_flat(const Sinusoid& s) {
  return s.amplitude == 0.0 || s.angular_frequency == 0.0;
}

double sinusoid_at(const Sinusoid& s, double t) {
  return s.base + s.amplitude * std::sin(s.angular_frequency * t + s.phase);
}

double interpolate(const PiecewiseLinear& p, double t) {
  const auto& k = p.knots;
  if (t <= k.front().time) return k.front().value;
  if (t >= k.back().time) return k.back().value;
  auto hi = std::upper_bound(k.begin(), k.end(), t,
                             [](double v, const Knot& kn) { return v < kn.time; });
  auto lo = hi - 1;
  double w = (t - lo->time) / (hi->time - lo->time);
  return lo->value + w * (hi->value - lo->value);
}

// Calls fn(s, e) for consecutive sub-intervals of [t0, t1] on which the
// piecewise-linear function is affine.
template <class Fn>
void for_each_affine_piece(const PiecewiseLinear& p, double t0, double t1, Fn&& fn) {
  double s = t0;
  for (const Knot& kn : p.knots) {
    if (kn.time <= s) continue;
    if (kn.time >= t1) break;
    fn(s, kn.time);
    s = kn.time;
  }
  fn(s, t1);
}

}  // namespace

TimeFunction::TimeFunction(Constant c) : form_(c) { require_finite(c.value, "constant"); }

TimeFunction::TimeFunction(Sinusoid s) : form_(s) {
  require_finite(s.base, "sinusoid base");
  require_finite(s.amplitude, "sinusoid amplitude");
  require_finite(s.angular_frequency, "sinusoid angular frequency");
  require_finite(s.phase, "sinusoid phase");
  if (s.angular_frequency < 0.0) {
    throw std::invalid_argument("time function: angular frequency must be >= 0");
  }
}

TimeFunction::TimeFunction(PiecewiseLinear p) : form_(std::move(p)) {
  const auto& knots = std::get<PiecewiseLinear>(form_).knots;
  if (knots.empty()) throw std::invalid_argument("time function: piecewise-linear needs a knot");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    require_finite(knots[i].time, "knot time");
    require_finite(knots[i].value, "knot value");
    if (knots[i].time < 0.0) throw std::invalid_argument("time function: knot time < 0");
    if (i > 0 && !(knots[i].time > knots[i - 1].time)) {
      throw std::invalid_argument("time function: knot times must be strictly increasing");
    }
  }
}

double TimeFunction::operator()(double t) const {
  return std::visit(Overloaded{[](const Constant& c) { return c.value; },
                               [t](const Sinusoid& s) { return sinusoid_at(s, t); },
                               [t](const PiecewiseLinear& p) { return interpolate(p, t); }},
                    form_);
}

Bounds TimeFunction::bounds() const {
  return std::visit(
      Overloaded{[](const Constant& c) { return Bounds{c.value, c.value}; },
                 [](const Sinusoid& s) {
                   if (sinusoid_is_flat(s)) {
                     double v = sinusoid_at(s, 0.0);
                     return Bounds{v, v};
                   }
                   double r = std::abs(s.amplitude);
                   return Bounds{s.base - r, s.base + r};
                 },
                 [](const PiecewiseLinear& p) {
                   auto [lo, hi] = std::minmax_element(
                       p.knots.begin(), p.knots.end(),
                       [](const Knot& a, const Knot& b) { return a.value < b.value; });
                   return Bounds{lo->value, hi->value};
                 }},
      form_);
}

bool TimeFunction::is_constant() const {
  auto b = bounds();
  return b.inf == b.sup;
}

std::vector<double> TimeFunction::breakpoints(double t0, double t1) const {
  std::vector<double> out;
  if (const auto* p = std::get_if<PiecewiseLinear>(&form_)) {
    for (const Knot& k : p->knots) {
      if (k.time > t0 && k.time < t1) out.push_back(k.time);
    }
  } else if (const auto* s = std::get_if<Sinusoid>(&form_)) {
    if (!sinusoid_is_flat(*s)) {
      const double quarter = std::numbers::pi / 2.0;
      double k = std::floor((s->angular_frequency * t0 + s->phase) / quarter) + 1.0;
      for (;; k += 1.0) {
        double t = (k * quarter - s->phase) / s->angular_frequency;
        if (t >= t1) break;
        if (t > t0) out.push_back(t);
      }
    }
  }
  return out;
}

double integral(const TimeFunction& f, double t0, double t1) {
  const double span = t1 - t0;
  return std::visit(
      Overloaded{[&](const Constant& c) { return c.value * span; },
                 [&](const Sinusoid& s) {
                   if (s.angular_frequency == 0.0) return sinusoid_at(s, 0.0) * span;
                   double w = s.angular_frequency;
                   return s.base * span - s.amplitude / w *
                                              (std::cos(w * t1 + s.phase) - std::cos(w * t0 + s.phase));
                 },
                 [&](const PiecewiseLinear& p) {
                   double acc = 0.0;
                   for_each_affine_piece(p, t0, t1, [&](double a, double b) {
                     acc += 0.5 * (b - a) * (interpolate(p, a) + interpolate(p, b));
                   });
                   return acc;
                 }},
      f.form());
}

double integral_of_square(const TimeFunction& f, double t0, double t1) {
  const double span = t1 - t0;
  return std::visit(
      Overloaded{[&](const Constant& c) { return c.value * c.value * span; },
                 [&](const Sinusoid& s) {
                   if (s.angular_frequency == 0.0) {
                     double v = sinusoid_at(s, 0.0);
                     return v * v * span;
                   }
                   double w = s.angular_frequency;
                   double u0 = w * t0 + s.phase, u1 = w * t1 + s.phase;
                   double int_sin = -(std::cos(u1) - std::cos(u0)) / w;
                   double int_sin2 = 0.5 * span - (std::sin(2.0 * u1) - std::sin(2.0 * u0)) / (4.0 * w);
                   return s.base * s.base * span + 2.0 * s.base * s.amplitude * int_sin +
                          s.amplitude * s.amplitude * int_sin2;
                 },
                 [&](const PiecewiseLinear& p) {
                   double acc = 0.0;
                   for_each_affine_piece(p, t0, t1, [&](double a, double b) {
                     double fa = interpolate(p, a), fb = interpolate(p, b);
                     acc += (b - a) * (fa * fa + fa * fb + fb * fb) / 3.0;
                   });
                   return acc;
                 }},
      f.form());
}

Bounds square_bounds(const TimeFunction& f) {
  Bounds b = f.bounds();
  double hi = std::max(b.inf * b.inf, b.sup * b.sup);
  double lo = (b.inf <= 0.0 && b.sup >= 0.0) ? 0.0 : std::min(b.inf * b.inf, b.sup * b.sup);
  return {lo, hi};
}

std::string describe(const TimeFunction& f) {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{[&](const Constant& c) { os << "constant(" << c.value << ")"; },
                        [&](const Sinusoid& s) {
                          os << "sinusoid(" << s.base << ", " << s.amplitude << ", "
                             << s.angular_frequency << ", " << s.phase << ")";
                        },
                        [&](const PiecewiseLinear& p) {
                          os << "piecewise(";
                          for (std::size_t i = 0; i < p.knots.size(); ++i) {
                            os << (i ? ", " : "") << p.knots[i].time << ":" << p.knots[i].value;
                          }
                          os << ")";
                        }},
             f.form());
  return os.str();
}

}  // namespace ppjump
