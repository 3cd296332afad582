#include "ppjump/commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace ppjump {

namespace fs = std::filesystem;

namespace {

const char* species_name(Species sp) { return sp == Species::prey ? "prey" : "predator"; }

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  os << text;
  if (!os) throw std::runtime_error("cannot write " + path.string());
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

std::string path_file_name(std::size_t i) {
  std::ostringstream os;
  os << "path_" << std::setw(5) << std::setfill('0') << i << ".csv";
  return os.str();
}

std::string fixed(double v, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

RegimeCheck check_extinct(const ScenarioConfig& c, const EnsembleSummary& s, Species sp) {
  RegimeCheck r;
  r.regime = Regime::Extinct;
  const double frac = extinction_fraction(s, sp, c.ensemble.extinction_cutoff);
  r.margin = frac - c.analysis.min_extinct_fraction;
  r.compatible = r.margin >= 0.0;
  r.evidence = "P{x(T) < " + fixed(c.ensemble.extinction_cutoff) + "} = " + fixed(frac);
  r.details = {{"extinct_fraction", frac},
               {"cutoff", c.ensemble.extinction_cutoff},
               {"required_fraction", c.analysis.min_extinct_fraction}};
  return r;
}

RegimeCheck check_permanent(const ScenarioConfig& c, const EnsembleSummary& s,
                            const EnsembleSummary& pilot, Species sp) {
  RegimeCheck r;
  r.regime = Regime::StochasticallyPermanent;
  double h = 0.0, H = 0.0;
  std::string source = "override";
  if (c.analysis.h && c.analysis.H) {
    h = *c.analysis.h;
    H = *c.analysis.H;
  } else {
    source = "pilot";
    if (pilot.completed == 0) {
      r.compatible = false;
      r.margin = -1.0;
      r.evidence = "pilot ensemble produced no paths";
      return r;
    }
    Levels lv = quantile_levels(pilot, sp, pilot.last());
    h = c.analysis.h.value_or(lv.low);
    H = c.analysis.H.value_or(lv.high);
  }
  if (!(h < H)) {
    r.compatible = false;
    r.margin = -1.0;
    r.evidence = "pilot levels collapse (h = H = " + fixed(h) + "); set analysis.h and analysis.H";
    r.details = {{"h", h}, {"H", H}, {"levels_from", source}};
    return r;
  }
  PermanenceResult res = permanence_check(s, sp, c.analysis.epsilon, h, H);
  r.compatible = res.pass;
  r.margin = std::min(res.upper_margin, res.lower_margin);
  r.evidence = "P{" + fixed(h) + " <= x} and P{x <= " + fixed(H) + "} over the tail, eps = " +
               fixed(c.analysis.epsilon);
  r.details = {{"h", h},
               {"H", H},
               {"levels_from", source},
               {"epsilon", c.analysis.epsilon},
               {"upper_margin", res.upper_margin},
               {"lower_margin", res.lower_margin}};
  return r;
}

nlohmann::json trend_json(const PersistenceResult& pr) {
  nlohmann::json t = nlohmann::json::array();
  for (const auto& [time, v] : pr.trend) t.push_back({time, v});
  return t;
}

RegimeCheck check_persistence(const ScenarioConfig& c, const EnsembleSummary& s, Species sp,
                              Regime regime) {
  RegimeCheck r;
  r.regime = regime;
  PersistenceResult pr;
  try {
    pr = persistence_in_mean(s, sp, {c.analysis.delta_np, c.analysis.delta_wp});
  } catch (const std::invalid_argument& e) {
    r.compatible = false;
    r.margin = -1.0;
    r.evidence = e.what();
    return r;
  }
  r.details = {{"verdict", to_string(pr.verdict)},
               {"time_average_estimate", pr.time_avg_estimate},
               {"trend", trend_json(pr)},
               {"delta_np", c.analysis.delta_np},
               {"delta_wp", c.analysis.delta_wp},
               {"path_fraction_persistent", pr.path_fraction_persistent},
               {"path_fraction_vanishing", pr.path_fraction_vanishing}};
  r.evidence = "tail mean of (1/t) int x = " + fixed(pr.time_avg_estimate) + ", verdict " +
               to_string(pr.verdict);
  if (regime == Regime::WeaklyPersistentInMean) {
    double lowest = pr.trend.front().second;
    for (const auto& pt : pr.trend) lowest = std::min(lowest, pt.second);
    r.margin = lowest - c.analysis.delta_wp;
    r.compatible = pr.verdict == PersistenceVerdict::WeaklyPersistent;
  } else {
    r.margin = c.analysis.delta_np - pr.time_avg_estimate;
    r.compatible = pr.verdict != PersistenceVerdict::WeaklyPersistent;
    r.warning = pr.verdict == PersistenceVerdict::Inconclusive;
  }
  return r;
}

RegimeCheck check_regime(const ScenarioConfig& c, const EnsembleSummary& s,
                         const EnsembleSummary& pilot, Species sp, Regime regime) {
  switch (regime) {
    case Regime::Extinct:
      return check_extinct(c, s, sp);
    case Regime::StochasticallyPermanent:
      return check_permanent(c, s, pilot, sp);
    case Regime::NonPersistentInMean:
    case Regime::WeaklyPersistentInMean:
      return check_persistence(c, s, sp, regime);
    case Regime::Indeterminate:
      break;
  }
  RegimeCheck r;
  r.evidence = "no prediction to test";
  return r;
}

RegimeCheck check_boundedness(const ScenarioConfig& c, const EnsembleSummary& s,
                              const EnsembleSummary& pilot) {
  RegimeCheck r;
  r.regime = Regime::Indeterminate;
  if (pilot.completed == 0) {
    r.compatible = false;
    r.margin = -1.0;
    r.evidence = "pilot ensemble produced no paths";
    return r;
  }
  const double chi = quantile(norm_samples(pilot, pilot.last()), 0.99);
  const double exceed = norm_exceedance(s, s.last(), chi);
  r.margin = c.analysis.epsilon - exceed;
  r.compatible = exceed < c.analysis.epsilon;
  r.evidence = "P{|X(T)| > " + fixed(chi) + "} = " + fixed(exceed);
  r.details = {{"chi", chi}, {"exceedance", exceed}, {"epsilon", c.analysis.epsilon}};
  return r;
}

nlohmann::json to_json(const RegimeCheck& r, bool with_regime) {
  nlohmann::json j;
  if (with_regime) j["regime"] = std::string(to_string(r.regime));
  j["compatible"] = r.compatible;
  j["warning"] = r.warning;
  j["margin"] = r.margin;
  j["evidence"] = r.evidence;
  j["details"] = r.details.is_null() ? nlohmann::json::object() : r.details;
  return j;
}

}  // namespace

RegimeReport cmd_analyze(const ScenarioConfig& config, const RunContext& ctx) {
  RegimeReport report = classify(config.model, config.analysis_params());
  if (config.wants("json")) write_json(ctx.out_dir / "regime_report.json", to_json(report));
  if (ctx.console) {
    std::ostream& os = *ctx.console;
    os << "regime analysis over [0, " << report.horizon << "]\n";
    for (Species sp : kBothSpecies) {
      const SpeciesRegime& r = report[sp];
      os << "  " << std::left << std::setw(9) << species_name(sp) << std::right;
      if (!r.present) {
        os << "absent\n";
        continue;
      }
      os << to_string(r.classification) << "  (p_bar* = " << fixed(r.p_bar_star)
         << ", p_inf >= " << fixed(r.p_inf.certified) << ", p_sup <= " << fixed(r.p_sup.certified)
         << ")\n";
    }
  }
  return report;
}

SimulateResult cmd_simulate(const ScenarioConfig& config, const RunContext& ctx) {
  SimulateResult out;
  const EnsembleParams params = config.ensemble_params(ctx.threads);
  const std::size_t to_save = std::min(config.output.max_saved_paths, params.num_paths);
  if (config.wants("csv")) {
    for (std::size_t i = 0; i < to_save; ++i) {
      PathRecord rec;
      try {
        rec = simulate_path(config.model, params.sim, i);
      } catch (const std::runtime_error&) {
        continue;  // counted as a failure by the ensemble below
      }
      std::ostringstream os;
      write_csv(rec, os);
      write_text(ctx.out_dir / "paths" / path_file_name(i), os.str());
      ++out.saved_paths;
    }
  }

  out.summary = run_ensemble(config.model, params);
  const EnsembleSummary& s = out.summary;
  if (config.wants("json")) write_json(ctx.out_dir / "ensemble_summary.json", to_json(s));
  if (config.wants("csv")) {
    std::ostringstream os;
    write_csv(s, os);
    write_text(ctx.out_dir / "ensemble_summary.csv", os.str());
  }
  out.exit_code = s.run_failed() ? kExitRuntime : kExitOk;

  if (ctx.console) {
    std::ostream& os = *ctx.console;
    os << "ensemble: " << s.completed << " of " << s.attempted << " paths completed to T = "
       << params.sim.horizon << " (failure fraction " << fixed(s.failure_fraction()) << ")\n";
    if (s.completed > 0) {
      for (Species sp : kBothSpecies) {
        if (sp == Species::predator && config.model.prey_only) continue;
        Estimate e = moment(s, sp, s.last(), 1.0);
        os << "  E[" << species_name(sp) << "(T)] = " << fixed(e.value) << " +/- "
           << fixed(e.std_error, 3) << "\n";
      }
    }
    if (s.run_failed()) os << "  too many paths aborted: " << s.first_failure << "\n";
  }
  return out;
}

VerifyOutcome cmd_verify(const ScenarioConfig& config, const RunContext& ctx) {
  RegimeReport report = cmd_analyze(config, ctx);
  SimulateResult sim = cmd_simulate(config, ctx);
  const EnsembleSummary& s = sim.summary;

  VerifyOutcome out;
  out.failure_fraction = s.failure_fraction();
  out.run_failed = s.run_failed();
  if (!validate_assumption1(config.model).passed()) {
    out.warnings.push_back("standing assumptions do not hold; regime predictions are formal only");
  }

  const EnsembleSummary pilot = run_pilot(config.model, config.ensemble_params(ctx.threads));

  for (Species sp : kBothSpecies) {
    SpeciesVerification& v = out.species[index(sp)];
    const SpeciesRegime& r = report[sp];
    v.species = sp;
    v.present = r.present;
    v.predicted = r.classification;
    v.implied = r.implied;
    if (!r.present) continue;
    if (s.completed == 0) {
      v.agreement = false;
      continue;
    }
    std::vector<Regime> to_check{r.classification};
    to_check.insert(to_check.end(), r.implied.begin(), r.implied.end());
    for (Regime regime : to_check) {
      if (regime == Regime::Indeterminate) continue;
      RegimeCheck chk = check_regime(config, s, pilot, sp, regime);
      if (chk.warning) {
        out.warnings.push_back(std::string(species_name(sp)) + ": " +
                               std::string(to_string(regime)) +
                               " predicted, evidence inconclusive (accepted)");
      }
      v.agreement = v.agreement && chk.compatible;
      v.checks.push_back(std::move(chk));
    }
  }

  if (s.completed > 0) {
    out.boundedness = check_boundedness(config, s, pilot);
  } else {
    out.boundedness.compatible = false;
    out.boundedness.evidence = "no completed paths";
  }

  out.agreement = out.boundedness.compatible;
  for (const auto& v : out.species) out.agreement = out.agreement && v.agreement;

  if (config.wants("json")) write_json(ctx.out_dir / "verify.json", to_json(out));

  if (ctx.console) {
    std::ostream& os = *ctx.console;
    os << "verification:\n";
    for (const auto& v : out.species) {
      if (!v.present) continue;
      for (const auto& chk : v.checks) {
        os << "  " << std::left << std::setw(9) << species_name(v.species) << std::right
           << (chk.compatible ? (chk.warning ? "warn " : "ok   ") : "FAIL ") << to_string(chk.regime)
           << ": " << chk.evidence << "\n";
      }
      if (v.checks.empty()) {
        os << "  " << std::left << std::setw(9) << species_name(v.species) << std::right
           << "ok   Indeterminate: nothing to test\n";
      }
    }
    os << "  boundedness " << (out.boundedness.compatible ? "ok   " : "FAIL ")
       << out.boundedness.evidence << "\n";
    for (const auto& w : out.warnings) os << "  warning: " << w << "\n";
    os << (out.exit_code() == kExitOk ? "agreement\n" : "DISAGREEMENT\n");
  }
  return out;
}

nlohmann::json to_json(const VerifyOutcome& o) {
  nlohmann::json species = nlohmann::json::array();
  for (const auto& v : o.species) {
    nlohmann::json j;
    j["species"] = species_name(v.species);
    j["present"] = v.present;
    if (v.present) {
      j["predicted"] = std::string(to_string(v.predicted));
      nlohmann::json implied = nlohmann::json::array();
      for (Regime r : v.implied) implied.push_back(std::string(to_string(r)));
      j["implied"] = implied;
      nlohmann::json checks = nlohmann::json::array();
      for (const auto& c : v.checks) checks.push_back(to_json(c, true));
      j["checks"] = checks;
      j["agreement"] = v.agreement;
    }
    species.push_back(j);
  }
  return {{"schema_version", kSchemaVersion},
          {"kind", "verify_outcome"},
          {"agreement", o.agreement},
          {"exit_code", o.exit_code()},
          {"failure_fraction", o.failure_fraction},
          {"run_failed", o.run_failed},
          {"species", species},
          {"boundedness", to_json(o.boundedness, false)},
          {"warnings", o.warnings}};
}

}  // namespace ppjump
