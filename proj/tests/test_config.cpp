#include "doctest.h"

#include <string>

#include "ppjump/config.hpp"
#include "ppjump/functionals.hpp"
#include "ppjump/presets.hpp"
#include "support.hpp"

using namespace ppjump;

namespace {

std::string minimal_text() {
  return "schema_version = 1\n"
         "model.a1 = constant(1)\n"
         "model.a2 = constant(0.3)\n"
         "model.b1 = constant(1)\n"
         "model.c1 = constant(0.5)\n"
         "model.c2 = constant(0.5)\n"
         "model.m = constant(1)\n"
         "model.sigma1 = constant(0.2)\n"
         "model.sigma2 = constant(0.2)\n"
         "model.x0 = 0.5, 0.5\n"
         "sim.horizon = 10\n"
         "sim.dt = 0.01\n";
}

std::string without(const std::string& text, const std::string& key) {
  std::string out, line;
  std::istringstream in(text);
  while (std::getline(in, line)) {
    if (line.rfind(key + " ", 0) != 0) out += line + "\n";
  }
  return out;
}

std::string schema_field(const std::string& text) {
  try {
    parse_config(text);
  } catch (const SchemaViolation& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal config gets the documented defaults") {
  ScenarioConfig c = parse_config(minimal_text());
  CHECK(c.sim.seed == 42);
  CHECK(c.sim.scheme == Scheme::LogEuler);
  CHECK(c.ensemble.num_paths == 1000);
  CHECK(c.analysis.epsilon == 0.05);
  CHECK(c.output.max_saved_paths == 10);
  CHECK(c.wants("csv"));
  CHECK(c.wants("json"));
  CHECK(c.model.channel1.measure.atoms().empty());
  CHECK(c.analysis_params().horizon == 10.0);
}

TEST_CASE("extinction preset has negative rates for both species") {
  ScenarioConfig c = load_preset("extinction");
  RegimeReport r = classify(c.model, c.analysis_params());
  for (Species sp : kBothSpecies) {
    CHECK(r[sp].p_bar_star < 0.0);
    CHECK(r[sp].classification == Regime::Extinct);
  }
}

TEST_CASE("missing required keys are named") {
  CHECK(schema_field(without(minimal_text(), "model.b1")) == "model.b1");
  CHECK(schema_field(without(minimal_text(), "sim.dt")) == "sim.dt");
  CHECK(schema_field(without(minimal_text(), "schema_version")) == "schema_version");
}

TEST_CASE("assumption violations surface from parsing") {
  std::string text = minimal_text();
  text.replace(text.find("model.m = constant(1)"), 21, "model.m = constant(0)");
  try {
    parse_config(text);
    FAIL("expected a violation");
  } catch (const AssumptionViolation& e) {
    CHECK(std::string(e.what()).find("m_inf > 0 violated") != std::string::npos);
  }
  ScenarioConfig c = parse_config(text, {.force_allow_degenerate = true});
  CHECK(c.model.m(0) == 0.0);
  CHECK_NOTHROW(parse_config(text + "flags.allow_degenerate = true\n"));
}

TEST_CASE("schema errors") {
  CHECK(schema_field(minimal_text() + "model.a3 = constant(1)\n") == "model.a3");
  CHECK(schema_field(minimal_text() + "sim.dt = 0.02\n") == "sim.dt");
  CHECK(schema_field(minimal_text() + "this line has no equals\n") == "line 13");
  CHECK(schema_field(minimal_text() + "bad key! = 1\n") == "line 13");
  CHECK(schema_field(minimal_text() + "analysis.epsilon = 1.5\n") == "analysis.epsilon");
  CHECK(schema_field(minimal_text() + "analysis.h = 2\nanalysis.H = 1\n") == "analysis.h");
  CHECK(schema_field(minimal_text() + "sim.scheme = rk4\n") == "sim.scheme");
  CHECK(schema_field(minimal_text() + "ensemble.num_paths = -3\n") == "ensemble.num_paths");
  CHECK(schema_field(minimal_text() + "ensemble.num_paths = 0\n") == "ensemble.num_paths");

  std::string bad_version = minimal_text();
  bad_version.replace(0, 18, "schema_version = 2");
  CHECK(schema_field(bad_version) == "schema_version");

  std::string bad_dt = without(minimal_text(), "sim.dt") + "sim.dt = 0.3\n";
  CHECK(schema_field(bad_dt) == "sim.dt");
}

TEST_CASE("jump channels need one amplitude per atom") {
  std::string base = minimal_text() + "model.channel1.atoms = 0:0.5, 1:0.2\n";
  CHECK(schema_field(base + "model.channel1.gamma1 = constant(0.1)\nmodel.channel1.gamma2 = constant(0.1); constant(0)\n") ==
        "model.channel1.gamma1");
  CHECK(schema_field(base + "model.channel1.gamma1 = constant(0.1); constant(0.2)\n") ==
        "model.channel1.gamma2");
  ScenarioConfig c = parse_config(base +
                                  "model.channel1.gamma1 = constant(0.1); constant(0.2)\n"
                                  "model.channel1.gamma2 = constant(-0.1); sinusoid(0, 0.1, 1, 0)\n");
  CHECK(c.model.channel1.measure.atoms().size() == 2);
  CHECK(c.model.channel1.amplitude[1][1] == TimeFunction(Sinusoid{0, 0.1, 1, 0}));
  CHECK(c.model.channel1.compensated);
  CHECK_FALSE(c.model.channel2.compensated);
  CHECK(schema_field(minimal_text() + "model.channel2.atoms = 0:-1\n"
                                      "model.channel2.delta1 = constant(0)\nmodel.channel2.delta2 = constant(0)\n") ==
        "model.channel2.atoms");
}

TEST_CASE("unreadable file") {
  CHECK_THROWS_AS(load_config("/nonexistent/dir/none.cfg"), UnreadableConfig);
}

TEST_CASE("time function grammar") {
  CHECK(parse_time_function("constant(2.5)") == TimeFunction::constant(2.5));
  CHECK(parse_time_function(" sinusoid( 1, 0.5 , 2, 0.25 ) ") == TimeFunction(Sinusoid{1, 0.5, 2, 0.25}));
  CHECK(parse_time_function("piecewise(0:1, 2:3)") == TimeFunction(PiecewiseLinear{{{0, 1}, {2, 3}}}));
  CHECK_THROWS(parse_time_function("3"));
  CHECK_THROWS(parse_time_function("cosine(1)"));
  CHECK_THROWS(parse_time_function("sinusoid(1, 2)"));
  CHECK_THROWS(parse_time_function("piecewise(1:1, 0:2)"));
  CHECK_THROWS(parse_time_function("constant(nan)"));
  for (const char* s : {"constant(0.1)", "sinusoid(0.2, 0.1, 0.7, 3)", "piecewise(0:1, 50:1.5, 100:1)"}) {
    TimeFunction f = parse_time_function(s);
    CHECK(parse_time_function(emit_time_function(f)) == f);
  }
}

TEST_CASE("every preset parses and survives a round trip") {
  REQUIRE(presets().size() == 12);
  for (const Preset& p : presets()) {
    CAPTURE(p.name);
    ScenarioConfig c = load_preset(p.name);
    CHECK(c.name == std::string(p.name));
    CHECK_FALSE(preset_summary(p).empty());
    CHECK(parse_config(emit_config(c)) == c);
    CHECK(emit_config(parse_config(emit_config(c))) == emit_config(c));
  }
  CHECK(find_preset("nope") == nullptr);
  CHECK_THROWS_AS(load_preset("nope"), std::out_of_range);
}

TEST_CASE("embedded presets match the files on disk") {
  for (const Preset& p : presets()) {
    CAPTURE(p.name);
    std::string path = std::string(PPJUMP_SOURCE_DIR) + "/presets/" + std::string(p.name) + ".cfg";
    CHECK(test::slurp(path) == std::string(p.text));
    CHECK(load_config(path) == load_preset(p.name));
  }
}

TEST_CASE("prey-only flag carries into the model") {
  ScenarioConfig c = load_preset("prey_only_permanence");
  CHECK(c.flags.prey_only);
  CHECK(c.model.prey_only);
  CHECK(c.model.x0[1] == 0.0);
}

TEST_CASE("ensemble parameters derived from settings") {
  ScenarioConfig c = parse_config(minimal_text() +
                                  "ensemble.num_checkpoints = 5\n"
                                  "analysis.theta_list = 0.25, 0.5\n"
                                  "analysis.h = 0.1\nanalysis.H = 3\n");
  EnsembleParams p = c.ensemble_params(3);
  CHECK(p.checkpoints.size() == 5);
  CHECK(p.checkpoints.back() == 10.0);
  CHECK(p.inverse_orders == std::vector<double>{0.25, 0.5});
  CHECK(p.moment_orders == std::vector<double>{1.0, 2.0});
  CHECK(p.upper_levels == std::vector<double>{3.0});
  CHECK(p.lower_levels == std::vector<double>{0.1});
  CHECK(p.threads == 3);
  CHECK(p.num_paths == 1000);
}
