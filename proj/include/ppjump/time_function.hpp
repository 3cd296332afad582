#ifndef PPJUMP_TIME_FUNCTION_HPP
#define PPJUMP_TIME_FUNCTION_HPP

#include <string>
#include <variant>
#include <vector>

namespace ppjump {

struct Constant {
  double value = 0.0;
  bool operator==(const Constant&) const = default;
};

/// base + amplitude * sin(angular_frequency * t + phase)
struct Sinusoid {
  double base = 0.0;
  double amplitude = 0.0;
  double angular_frequency = 0.0;  // radians per unit time, >= 0
  double phase = 0.0;
  bool operator==(const Sinusoid&) const = default;
};

struct Knot {
  double time = 0.0;
  double value = 0.0;
  bool operator==(const Knot&) const = default;
};

/// Linear interpolation between knots, constant extrapolation on both sides.
struct PiecewiseLinear {
  std::vector<Knot> knots;
  bool operator==(const PiecewiseLinear&) const = default;
};

struct Bounds {
  double inf = 0.0;
  double sup = 0.0;
};

/// Bounded continuous coefficient on [0, inf) with exact analytic sup/inf.
///
/// Construction validates the form and throws std::invalid_argument on
/// non-finite parameters, negative angular frequency, or knots that are
/// empty, negative in time or not strictly increasing.
class TimeFunction {
 public:
  using Form = std::variant<Constant, Sinusoid, PiecewiseLinear>;

  TimeFunction() : form_(Constant{0.0}) {}
  TimeFunction(Constant c);
  TimeFunction(Sinusoid s);
  TimeFunction(PiecewiseLinear p);

  static TimeFunction constant(double v) { return TimeFunction(Constant{v}); }

  double operator()(double t) const;
  Bounds bounds() const;

  const Form& form() const { return form_; }
  /// True when the value does not depend on t (including zero-amplitude or
  /// zero-frequency sinusoids and single-valued knot lists).
  bool is_constant() const;

  /// Times in (t0, t1) where the closed form changes character: knot times
  /// for piecewise-linear, quarter-period marks for sinusoids. Used to split
  /// quadrature into smooth pieces.
  std::vector<double> breakpoints(double t0, double t1) const;

  bool operator==(const TimeFunction&) const = default;

 private:
  Form form_;
};

inline double eval(const TimeFunction& f, double t) { return f(t); }
inline Bounds bounds(const TimeFunction& f) { return f.bounds(); }

/// Exact integral of f over [t0, t1].
double integral(const TimeFunction& f, double t0, double t1);

/// Exact integral of f(t)^2 over [t0, t1].
double integral_of_square(const TimeFunction& f, double t0, double t1);

/// Bounds of f^2 over [0, inf), derived from bounds(f).
Bounds square_bounds(const TimeFunction& f);

std::string describe(const TimeFunction& f);

}  // namespace ppjump

#endif  // PPJUMP_TIME_FUNCTION_HPP
