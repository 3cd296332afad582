#ifndef PPJUMP_TEST_SUPPORT_HPP
#define PPJUMP_TEST_SUPPORT_HPP

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ppjump/model_spec.hpp"

namespace ppjump::test {

inline TimeFunction K(double v) { return TimeFunction::constant(v); }

/// Single-atom channel with the same amplitude for both species.
inline JumpChannel one_atom(double mass, double amp1, double amp2, bool compensated) {
  return JumpChannel(FiniteJumpMeasure({{0.0, mass}}), {{{K(amp1)}, {K(amp2)}}}, compensated);
}

/// Constant-coefficient spec with no noise and no jumps.
inline ModelSpec quiet_spec(double a1 = 1.0, double a2 = 0.3) {
  ModelSpec s;
  s.a = {K(a1), K(a2)};
  s.b1 = K(1.0);
  s.c = {K(0.5), K(0.5)};
  s.m = K(1.0);
  s.sigma = {K(0.0), K(0.0)};
  s.x0 = {0.5, 0.5};
  return s;
}

/// The reduced linear prey: a = 0.3, sigma = 0.2, channel 1 mass 1 with
/// gamma = 0.1, channel 2 mass 0.5 with delta = 0.05, b1 = 0. Degenerate.
inline ModelSpec linear_spec() {
  ModelSpec s = quiet_spec(0.3, 0.1);
  s.b1 = K(0.0);
  s.sigma = {K(0.2), K(0.0)};
  s.channel1 = one_atom(1.0, 0.1, 0.0, true);
  s.channel2 = one_atom(0.5, 0.05, 0.0, false);
  s.x0 = {1.0, 0.0};
  s.prey_only = true;
  return s;
}

/// Noise-free prey-only logistic with a = b = 1, x0 = 0.5.
inline ModelSpec logistic_spec() {
  ModelSpec s = quiet_spec(1.0, 0.1);
  s.x0 = {0.5, 0.0};
  s.prey_only = true;
  return s;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ppjump_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace ppjump::test

#endif  // PPJUMP_TEST_SUPPORT_HPP
