#include "ppjump/regime.hpp"

#include <cmath>

namespace ppjump {

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Extinct:
      return "Extinct";
    case Regime::NonPersistentInMean:
      return "NonPersistentInMean";
    case Regime::WeaklyPersistentInMean:
      return "WeaklyPersistentInMean";
    case Regime::StochasticallyPermanent:
      return "StochasticallyPermanent";
    case Regime::Indeterminate:
      return "Indeterminate";
  }
  return "Indeterminate";
}

double default_tolerance_band(const ModelSpec& spec) {
  return spec.is_autonomous() ? 1e-6 : 1e-3;
}

namespace {

struct Match {
  Regime regime;
  const char* citation;
};

void record_matches(SpeciesRegime& out, const std::vector<Match>& matches) {
  if (matches.empty()) {
    out.classification = Regime::Indeterminate;
    return;
  }
  out.classification = matches.front().regime;
  for (std::size_t i = 0; i < matches.size(); ++i) {
    if (i > 0) out.implied.push_back(matches[i].regime);
    out.rule_citations.emplace_back(matches[i].citation);
  }
}

}  // namespace

RegimeReport classify(const ModelSpec& spec, const AnalysisParams& params) {
  const double band = params.tolerance_band.value_or(default_tolerance_band(spec));
  RegimeReport report;
  report.horizon = params.horizon;
  report.prey_only = spec.prey_only;
  report.boundedness_citation =
      "stochastic ultimate boundedness: holds for every initial value under the standing "
      "assumptions";

  for (Species s : kBothSpecies) {
    SpeciesRegime& r = report.species[index(s)];
    r.species = s;
    r.tolerance_band = band;
    r.present = !(spec.prey_only && s == Species::predator);
    r.p_inf = net_growth_inf(spec, s, params.horizon);
    r.p_sup = net_growth_sup(spec, s, params.horizon);
    TimeAverage avg = net_growth_average(spec, s, params.horizon, params.num_horizons);
    r.p_bar_star = avg.estimate;
    r.p_bar_star_trace = std::move(avg.trace);
  }

  const double pb1 = report.species[0].p_bar_star;
  const double pb2 = report.species[1].p_bar_star;

  {
    SpeciesRegime& prey = report.species[0];
    std::vector<Match> m;
    if (pb1 < -band) {
      m.push_back({Regime::Extinct, "extinction: limsup of the time average of p_1 is negative"});
    }
    if (spec.prey_only && prey.p_inf.certified > band) {
      m.push_back({Regime::StochasticallyPermanent,
                   "prey permanence with predator absent: p_1 inf > 0"});
    }
    if (std::abs(pb1) <= band) {
      m.push_back({Regime::NonPersistentInMean,
                   "prey non-persistence in the mean: limsup of the time average of p_1 is 0"});
    }
    if (!spec.prey_only && pb1 > band && pb2 < -band) {
      m.push_back({Regime::WeaklyPersistentInMean,
                   "prey weak persistence in the mean: time average of p_1 > 0 and of p_2 < 0"});
    }
    record_matches(prey, m);
  }

  if (!spec.prey_only) {
    SpeciesRegime& pred = report.species[1];
    std::vector<Match> m;
    if (pb2 < -band) {
      m.push_back({Regime::Extinct, "extinction: limsup of the time average of p_2 is negative"});
    }
    if (pred.p_inf.certified > band) {
      m.push_back({Regime::StochasticallyPermanent, "predator permanence: p_2 inf > 0"});
    }
    if (std::abs(pb2) <= band && pb1 < -band) {
      m.push_back({Regime::NonPersistentInMean,
                   "predator non-persistence in the mean: time average of p_2 is 0 and of p_1 "
                   "< 0"});
    }
    if (pb2 > band) {
      m.push_back({Regime::WeaklyPersistentInMean,
                   "predator weak persistence in the mean: time average of p_2 > 0"});
    }
    record_matches(pred, m);
  }
  return report;
}

namespace {

nlohmann::json extremum_json(const ExtremumEstimate& e) {
  return {{"certified", e.certified}, {"sampled", e.sampled}, {"exact", e.exact}};
}

}  // namespace

nlohmann::json to_json(const RegimeReport& report) {
  nlohmann::json species = nlohmann::json::array();
  for (const SpeciesRegime& r : report.species) {
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& [h, v] : r.p_bar_star_trace) trace.push_back({{"horizon", h}, {"average", v}});
    nlohmann::json implied = nlohmann::json::array();
    for (Regime x : r.implied) implied.push_back(std::string(to_string(x)));
    species.push_back({
        {"species", r.species == Species::prey ? "prey" : "predator"},
        {"present", r.present},
        {"p_inf", extremum_json(r.p_inf)},
        {"p_sup", extremum_json(r.p_sup)},
        {"p_bar_star", r.p_bar_star},
        {"p_bar_star_trace", trace},
        {"classification", std::string(to_string(r.classification))},
        {"implied", implied},
        {"rule_citations", r.rule_citations},
        {"tolerance_band", r.tolerance_band},
    });
  }
  return {
      {"schema_version", 1},
      {"kind", "regime_report"},
      {"horizon", report.horizon},
      {"prey_only", report.prey_only},
      {"ultimately_bounded", report.ultimately_bounded},
      {"boundedness_citation", report.boundedness_citation},
      {"species", species},
  };
}

}  // namespace ppjump
