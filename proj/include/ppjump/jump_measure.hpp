#ifndef PPJUMP_JUMP_MEASURE_HPP
#define PPJUMP_JUMP_MEASURE_HPP

#include <array>
#include <cstddef>
#include <vector>

#include "ppjump/time_function.hpp"

namespace ppjump {

enum class Species : int { prey = 0, predator = 1 };

constexpr std::size_t index(Species s) { return static_cast<std::size_t>(s); }
constexpr std::array<Species, 2> kBothSpecies{Species::prey, Species::predator};

struct JumpAtom {
  double mark = 0.0;  // z label
  double mass = 0.0;  // intensity contribution, > 0
  bool operator==(const JumpAtom&) const = default;
};

/// Finite atomic intensity measure on mark space.
class FiniteJumpMeasure {
 public:
  FiniteJumpMeasure() = default;
  /// Throws std::invalid_argument on non-positive or non-finite masses and
  /// on repeated marks.
  explicit FiniteJumpMeasure(std::vector<JumpAtom> atoms);

  const std::vector<JumpAtom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  double total_mass() const { return total_mass_; }

  bool operator==(const FiniteJumpMeasure&) const = default;

 private:
  std::vector<JumpAtom> atoms_;
  double total_mass_ = 0.0;
};

/// One Poisson driver together with the relative jump sizes it imposes on
/// each species. amplitude[s][k] is the relative size for species s at atom k;
/// a jump multiplies the density by (1 + amplitude).
struct JumpChannel {
  FiniteJumpMeasure measure;
  std::array<std::vector<TimeFunction>, 2> amplitude;
  bool compensated = false;

  JumpChannel() = default;
  /// Throws std::invalid_argument if an amplitude list does not have one
  /// entry per atom.
  JumpChannel(FiniteJumpMeasure m, std::array<std::vector<TimeFunction>, 2> amp, bool comp);

  /// A channel with no atoms.
  static JumpChannel none(bool compensated) {
    JumpChannel c;
    c.compensated = compensated;
    return c;
  }

  /// Copy with atom k removed.
  JumpChannel without_atom(std::size_t k) const;

  bool operator==(const JumpChannel&) const = default;
};

}  // namespace ppjump

#endif  // PPJUMP_JUMP_MEASURE_HPP
