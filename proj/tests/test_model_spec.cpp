#include "doctest.h"

#include <random>

#include "ppjump/model_spec.hpp"
#include "support.hpp"

using namespace ppjump;
using ppjump::test::K;

namespace {

bool has_clause(const ValidationReport& r, const std::string& clause) {
  for (const auto& f : r.findings) {
    if (f.clause == clause) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("a fully positive constant spec passes") {
  ModelSpec s = test::quiet_spec();
  s.sigma = {K(0.2), K(0.1)};
  s.channel1 = test::one_atom(0.5, 0.1, -0.1, true);
  ValidationReport r = validate_assumption1(s);
  CHECK(r.passed());
  CHECK(r.findings.empty());
}

TEST_CASE("each violated clause is reported") {
  ModelSpec s = test::quiet_spec();
  s.b1 = K(0.0);
  CHECK(has_clause(validate_assumption1(s), "b_{1 inf} > 0 violated"));

  s = test::quiet_spec();
  s.channel1 = test::one_atom(1.0, -1.2, 0.0, true);
  ValidationReport r = validate_assumption1(s);
  CHECK_FALSE(r.passed());
  CHECK(has_clause(r, "1 + amplitude > 0 violated"));

  s = test::quiet_spec();
  s.m = K(0.0);
  CHECK(has_clause(validate_assumption1(s), "m_inf > 0 violated"));

  s = test::quiet_spec();
  s.a[1] = TimeFunction(Sinusoid{0.1, 0.2, 1, 0});
  CHECK(has_clause(validate_assumption1(s), "a_{2 inf} > 0 violated"));

  s = test::quiet_spec();
  s.c[0] = K(-1);
  CHECK(has_clause(validate_assumption1(s), "c_{1 inf} > 0 violated"));

  s = test::quiet_spec();
  s.x0 = {0.5, 0.0};
  CHECK(has_clause(validate_assumption1(s), "x0 > 0 violated"));
  s.prey_only = true;
  CHECK(validate_assumption1(s).passed());
}

TEST_CASE("several violations give several findings") {
  ModelSpec s = test::quiet_spec();
  s.b1 = K(0.0);
  s.m = K(-1.0);
  CHECK(validate_assumption1(s).findings.size() == 2);
}

TEST_CASE("require_valid and the degenerate bypass") {
  ModelSpec s = test::linear_spec();
  CHECK_THROWS_AS(require_valid(s, false), AssumptionViolation);
  CHECK_NOTHROW(require_valid(s, true));
  s.channel1 = test::one_atom(1.0, -1.5, 0.0, true);
  CHECK_THROWS_AS(require_valid(s, true), AssumptionViolation);
  try {
    require_valid(test::quiet_spec(0.0), false);
    FAIL("expected a violation");
  } catch (const AssumptionViolation& e) {
    CHECK(has_clause(e.report(), "a_{1 inf} > 0 violated"));
  }
}

TEST_CASE("jump measure and channel construction") {
  CHECK_THROWS_AS(FiniteJumpMeasure({{0.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(FiniteJumpMeasure({{0.0, -1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(FiniteJumpMeasure({{0.0, INFINITY}}), std::invalid_argument);
  CHECK_THROWS_AS(FiniteJumpMeasure({{1.0, 1.0}, {1.0, 2.0}}), std::invalid_argument);
  FiniteJumpMeasure m({{0.0, 1.0}, {1.0, 3.0}});
  CHECK(m.total_mass() == 4.0);
  CHECK_THROWS_AS(JumpChannel(m, {{{K(0.1)}, {K(0.1), K(0.2)}}}, true), std::invalid_argument);
  JumpChannel ch(m, {{{K(0.1), K(0.2)}, {K(0.3), K(0.4)}}}, true);
  JumpChannel less = ch.without_atom(0);
  CHECK(less.measure.size() == 1);
  CHECK(less.measure.total_mass() == 3.0);
  CHECK(less.amplitude[1][0] == K(0.4));
}

TEST_CASE("removing an atom never turns a pass into a fail") {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> amp(-0.9, 1.0), mass(0.1, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    ModelSpec s = test::quiet_spec();
    std::vector<JumpAtom> atoms;
    std::array<std::vector<TimeFunction>, 2> a;
    int n = 1 + static_cast<int>(g() % 4);
    for (int k = 0; k < n; ++k) {
      atoms.push_back({double(k), mass(g)});
      // Occasionally an invalid amplitude, so both outcomes are exercised.
      double bad = (g() % 5 == 0) ? -1.5 : amp(g);
      a[0].push_back(K(bad));
      a[1].push_back(K(amp(g)));
    }
    s.channel1 = JumpChannel(FiniteJumpMeasure(atoms), a, true);
    bool before = validate_assumption1(s).passed();
    for (int k = 0; k < n; ++k) {
      ModelSpec t = s;
      t.channel1 = s.channel1.without_atom(static_cast<std::size_t>(k));
      if (before) CHECK(validate_assumption1(t).passed());
    }
  }
}

TEST_CASE("validated specs have positive coefficients at sampled times") {
  ModelSpec s = test::quiet_spec();
  s.a[0] = TimeFunction(Sinusoid{1.0, 0.9, 2.0, 0.1});
  s.b1 = TimeFunction(PiecewiseLinear{{{0, 0.5}, {10, 0.01}, {20, 2}}});
  s.c[1] = TimeFunction(Sinusoid{0.3, -0.29, 0.7, 1.0});
  s.m = TimeFunction(Sinusoid{1, 0.5, 0.3, 0});
  REQUIRE(validate_assumption1(s).passed());
  for (int k = 0; k <= 10000; ++k) {
    double t = 0.1 * k;
    REQUIRE(s.a[0](t) > 0);
    REQUIRE(s.a[1](t) > 0);
    REQUIRE(s.b1(t) > 0);
    REQUIRE(s.c[0](t) > 0);
    REQUIRE(s.c[1](t) > 0);
    REQUIRE(s.m(t) > 0);
  }
}

TEST_CASE("autonomy detection") {
  ModelSpec s = test::quiet_spec();
  CHECK(s.is_autonomous());
  s.channel2 = JumpChannel(FiniteJumpMeasure({{0, 1}}),
                           {{{TimeFunction(Sinusoid{0.1, 0.05, 1, 0})}, {K(0)}}}, false);
  CHECK_FALSE(s.is_autonomous());
}
