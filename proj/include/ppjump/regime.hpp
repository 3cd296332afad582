#ifndef PPJUMP_REGIME_HPP
#define PPJUMP_REGIME_HPP

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ppjump/functionals.hpp"
#include "ppjump/model_spec.hpp"

namespace ppjump {

enum class Regime {
  Extinct,
  NonPersistentInMean,
  WeaklyPersistentInMean,
  StochasticallyPermanent,
  Indeterminate,
};

std::string_view to_string(Regime r);

struct AnalysisParams {
  double horizon = 100.0;
  /// Half-width of the band around zero inside which a sign call is not
  /// made. Defaults to default_tolerance_band(spec).
  std::optional<double> tolerance_band;
  int num_horizons = 8;
};

/// 1e-6 for autonomous specs, 1e-3 otherwise.
double default_tolerance_band(const ModelSpec& spec);

struct SpeciesRegime {
  Species species = Species::prey;
  bool present = true;
  ExtremumEstimate p_inf;
  ExtremumEstimate p_sup;
  double p_bar_star = 0.0;
  std::vector<std::pair<double, double>> p_bar_star_trace;
  /// First matching rule; `implied` lists further regimes that also follow.
  Regime classification = Regime::Indeterminate;
  std::vector<Regime> implied;
  std::vector<std::string> rule_citations;
  double tolerance_band = 0.0;
};

struct RegimeReport {
  std::array<SpeciesRegime, 2> species;
  double horizon = 0.0;
  bool prey_only = false;
  /// Holds unconditionally for specs satisfying the standing assumptions.
  bool ultimately_bounded = true;
  std::string boundedness_citation;

  const SpeciesRegime& operator[](Species s) const { return species[index(s)]; }
};

/// Maps the signs of the long-run average and infimum of p to the predicted
/// long-time regime of each species. Rules are tried in order: extinction,
/// stochastic permanence, non-persistence in the mean, weak persistence in
/// the mean; nothing matching gives Indeterminate.
RegimeReport classify(const ModelSpec& spec, const AnalysisParams& params);

nlohmann::json to_json(const RegimeReport& report);

}  // namespace ppjump

#endif  // PPJUMP_REGIME_HPP
