#include "ppjump/jump_measure.hpp"

#include <cmath>
#include <stdexcept>

namespace ppjump {

FiniteJumpMeasure::FiniteJumpMeasure(std::vector<JumpAtom> atoms) : atoms_(std::move(atoms)) {
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const JumpAtom& a = atoms_[i];
    if (!std::isfinite(a.mark)) throw std::invalid_argument("jump measure: non-finite mark");
    if (!std::isfinite(a.mass) || !(a.mass > 0.0)) {
      throw std::invalid_argument("jump measure: atom mass must be finite and > 0");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (atoms_[j].mark == a.mark) throw std::invalid_argument("jump measure: duplicate mark");
    }
    total_mass_ += a.mass;
  }
}

JumpChannel::JumpChannel(FiniteJumpMeasure m, std::array<std::vector<TimeFunction>, 2> amp,
                         bool comp)
    : measure(std::move(m)), amplitude(std::move(amp)), compensated(comp) {
  for (const auto& list : amplitude) {
    if (list.size() != measure.size()) {
      throw std::invalid_argument("jump channel: amplitude list length differs from atom count");
    }
  }
}

JumpChannel JumpChannel::without_atom(std::size_t k) const {
  std::vector<JumpAtom> atoms = measure.atoms();
  atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(k));
  auto amp = amplitude;
  for (auto& list : amp) list.erase(list.begin() + static_cast<std::ptrdiff_t>(k));
  return JumpChannel(FiniteJumpMeasure(std::move(atoms)), std::move(amp), compensated);
}

}  // namespace ppjump
