#include "ppjump/rng.hpp"

#include <cmath>
#include <numbers>

namespace ppjump {

std::pair<double, double> RngStream::normal_pair() {
  double r = std::sqrt(-2.0 * std::log(uniform()));
  double theta = 2.0 * std::numbers::pi * uniform();
  return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace ppjump
