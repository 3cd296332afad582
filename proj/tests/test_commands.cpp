#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "ppjump/commands.hpp"
#include "ppjump/presets.hpp"
#include "support.hpp"

using namespace ppjump;
namespace fs = std::filesystem;

namespace {

RunContext ctx_in(const std::string& name, unsigned threads = 0) {
  RunContext ctx;
  ctx.out_dir = test::scratch_dir(name);
  ctx.threads = threads;
  return ctx;
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(test::slurp(p)); }

const RegimeCheck* find_check(const SpeciesVerification& v, Regime r) {
  for (const RegimeCheck& c : v.checks) {
    if (c.regime == r) return &c;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("analyze writes the regime report") {
  RunContext ctx = ctx_in("cmd_analyze");
  RegimeReport r = cmd_analyze(load_preset("predator_permanence"), ctx);
  CHECK(r[Species::predator].classification == Regime::StochasticallyPermanent);
  nlohmann::json j = read_json(ctx.out_dir / "regime_report.json");
  CHECK(j["kind"] == "regime_report");
  CHECK(j["species"][1]["classification"] == "StochasticallyPermanent");
}

TEST_CASE("simulate writes paths and summaries, byte-identical on a re-run") {
  ScenarioConfig c = load_preset("predator_permanence");
  c.sim.horizon = 5;
  c.ensemble.num_paths = 30;
  c.output.max_saved_paths = 3;
  RunContext a = ctx_in("cmd_sim_a", 1), b = ctx_in("cmd_sim_b", 2);
  SimulateResult ra = cmd_simulate(c, a);
  cmd_simulate(c, b);
  CHECK(ra.exit_code == kExitOk);
  CHECK(ra.saved_paths == 3);
  CHECK(fs::exists(a.out_dir / "paths" / "path_00002.csv"));
  CHECK_FALSE(fs::exists(a.out_dir / "paths" / "path_00003.csv"));
  for (const char* f : {"ensemble_summary.json", "ensemble_summary.csv", "paths/path_00000.csv"}) {
    CAPTURE(f);
    CHECK(test::slurp(a.out_dir / f) == test::slurp(b.out_dir / f));
  }

  c.output.formats = {"json"};
  RunContext j = ctx_in("cmd_sim_json");
  CHECK(cmd_simulate(c, j).saved_paths == 0);
  CHECK(fs::exists(j.out_dir / "ensemble_summary.json"));
  CHECK_FALSE(fs::exists(j.out_dir / "ensemble_summary.csv"));
}

TEST_CASE("logistic and linear presets reproduce their closed-form means") {
  SimulateResult lg = cmd_simulate(load_preset("logistic"), ctx_in("cmd_logistic"));
  CHECK(std::abs(moment(lg.summary, Species::prey, lg.summary.last(), 1.0).value - 0.731059) < 5e-4);

  ScenarioConfig lin = load_preset("linear");
  lin.ensemble.num_paths = 20'000;
  lin.output.max_saved_paths = 0;
  SimulateResult ln = cmd_simulate(lin, ctx_in("cmd_linear"));
  Estimate m = moment(ln.summary, Species::prey, ln.summary.last(), 1.0);
  CHECK(std::abs(m.value - 1.384031) < 3 * m.std_error);
}

TEST_CASE("verify agrees on the extinction preset") {
  ScenarioConfig c = load_preset("extinction");
  c.ensemble.num_paths = 300;
  RunContext ctx = ctx_in("cmd_verify_ext");
  VerifyOutcome v = cmd_verify(c, ctx);
  CHECK(v.agreement);
  CHECK(v.exit_code() == kExitOk);
  for (Species sp : kBothSpecies) {
    const SpeciesVerification& s = v.species[index(sp)];
    CHECK(s.predicted == Regime::Extinct);
    const RegimeCheck* ext = find_check(s, Regime::Extinct);
    REQUIRE(ext != nullptr);
    CHECK(ext->compatible);
    CHECK(ext->margin >= 0.0);
  }
  CHECK(v.boundedness.compatible);
  nlohmann::json j = read_json(ctx.out_dir / "verify.json");
  CHECK(j["kind"] == "verify_outcome");
  CHECK(j["agreement"] == true);
  CHECK(fs::exists(ctx.out_dir / "regime_report.json"));
  CHECK(fs::exists(ctx.out_dir / "ensemble_summary.json"));
}

TEST_CASE("verify agrees on permanence and knife-edge presets") {
  ScenarioConfig perm = load_preset("predator_permanence");
  perm.ensemble.num_paths = 300;
  VerifyOutcome v = cmd_verify(perm, ctx_in("cmd_verify_perm"));
  CHECK(v.agreement);
  const SpeciesVerification& pred = v.species[1];
  CHECK(pred.predicted == Regime::StochasticallyPermanent);
  REQUIRE(find_check(pred, Regime::StochasticallyPermanent) != nullptr);
  REQUIRE(find_check(pred, Regime::WeaklyPersistentInMean) != nullptr);
  CHECK(find_check(pred, Regime::WeaklyPersistentInMean)->compatible);

  ScenarioConfig knife = load_preset("knife_edge");
  knife.ensemble.num_paths = 200;
  VerifyOutcome k = cmd_verify(knife, ctx_in("cmd_verify_knife"));
  CHECK(k.species[0].predicted == Regime::NonPersistentInMean);
  CHECK(k.agreement);
}

TEST_CASE("an inconclusive trend under predicted non-persistence is a warning") {
  // From a tiny start the prey time average is still climbing at the horizon.
  ScenarioConfig knife = load_preset("knife_edge");
  knife.model.x0 = {1e-7, 0.01};
  knife.sim.horizon = 20;
  knife.ensemble.num_paths = 100;
  std::ostringstream console;
  RunContext ctx = ctx_in("cmd_verify_warn");
  ctx.console = &console;
  VerifyOutcome v = cmd_verify(knife, ctx);
  const RegimeCheck* np = find_check(v.species[0], Regime::NonPersistentInMean);
  REQUIRE(np != nullptr);
  CHECK(np->compatible);
  CHECK(np->warning);
  CHECK_FALSE(v.warnings.empty());
  CHECK(console.str().find("warn") != std::string::npos);
}

TEST_CASE("verify reports a disagreement it cannot explain away") {
  // Finite-horizon logistic: the deterministic rise puts all mass above the
  // pilot's upper quantile.
  VerifyOutcome v = cmd_verify(load_preset("logistic"), ctx_in("cmd_verify_logistic"));
  CHECK_FALSE(v.boundedness.compatible);
  CHECK_FALSE(v.agreement);
  CHECK(v.exit_code() == kExitRuntime);
}

TEST_CASE("too many aborted paths fail the run") {
  ScenarioConfig c = load_preset("diffusion_only");
  c.model.sigma = {test::K(2.0), test::K(2.0)};
  c.sim.scheme = Scheme::DirectEuler;
  c.sim.dt = 0.1;
  c.sim.horizon = 2;
  c.ensemble.num_paths = 100;
  c.output.max_saved_paths = 0;
  SimulateResult r = cmd_simulate(c, ctx_in("cmd_sim_fail"));
  CHECK(r.summary.run_failed());
  CHECK(r.exit_code == kExitRuntime);
}
