#include "ppjump/model_spec.hpp"

#include <cmath>
#include <sstream>

namespace ppjump {

namespace {

constexpr const char* kAmplitudeClause = "1 + amplitude > 0";
constexpr const char* kInitialClause = "x0 > 0";

std::string species_label(std::size_t i) { return i == 0 ? "1" : "2"; }

void check_positive_inf(const TimeFunction& f, const std::string& clause, const std::string& name,
                        ValidationReport& out) {
  double inf = f.bounds().inf;
  if (!(inf > 0.0)) {
    std::ostringstream os;
    os << name << " has infimum " << inf;
    out.findings.push_back({clause + " violated", os.str()});
  }
}

void check_channel(const JumpChannel& ch, const char* channel_name, const char* amp_name,
                   ValidationReport& out) {
  if (!std::isfinite(ch.measure.total_mass())) {
    out.findings.push_back({"finite jump measure violated",
                            std::string(channel_name) + " has infinite total mass"});
  }
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t k = 0; k < ch.amplitude[s].size(); ++k) {
      double inf = ch.amplitude[s][k].bounds().inf;
      if (!(1.0 + inf > 0.0)) {
        std::ostringstream os;
        os << amp_name << "_" << species_label(s) << " at atom " << k << " reaches " << inf
           << " so 1 + " << amp_name << " <= 0";
        out.findings.push_back({std::string(kAmplitudeClause) + " violated", os.str()});
      }
    }
  }
}

}  // namespace

bool ModelSpec::is_autonomous() const {
  auto all_const = [](const auto& list) {
    for (const TimeFunction& f : list) {
      if (!f.is_constant()) return false;
    }
    return true;
  };
  if (!all_const(a) || !all_const(c) || !all_const(sigma)) return false;
  if (!b1.is_constant() || !m.is_constant()) return false;
  for (const JumpChannel* ch : {&channel1, &channel2}) {
    for (const auto& list : ch->amplitude) {
      if (!all_const(list)) return false;
    }
  }
  return true;
}

std::string ValidationReport::summary() const {
  if (findings.empty()) return "ok";
  std::ostringstream os;
  for (std::size_t i = 0; i < findings.size(); ++i) {
    os << (i ? "; " : "") << findings[i].clause << " (" << findings[i].detail << ")";
  }
  return os.str();
}

ValidationReport validate_assumption1(const ModelSpec& spec) {
  ValidationReport out;
  for (std::size_t i = 0; i < 2; ++i) {
    const std::string s = species_label(i);
    check_positive_inf(spec.a[i], "a_{" + s + " inf} > 0", "a_" + s, out);
  }
  check_positive_inf(spec.b1, "b_{1 inf} > 0", "b_1", out);
  for (std::size_t i = 0; i < 2; ++i) {
    const std::string s = species_label(i);
    check_positive_inf(spec.c[i], "c_{" + s + " inf} > 0", "c_" + s, out);
  }
  check_positive_inf(spec.m, "m_inf > 0", "m", out);
  check_channel(spec.channel1, "channel 1", "gamma", out);
  check_channel(spec.channel2, "channel 2", "delta", out);
  for (std::size_t i = 0; i < 2; ++i) {
    if (spec.prey_only && i == 1) continue;
    if (!(spec.x0[i] > 0.0) || !std::isfinite(spec.x0[i])) {
      std::ostringstream os;
      os << "x_" << species_label(i) << "0 = " << spec.x0[i];
      out.findings.push_back({std::string(kInitialClause) + " violated", os.str()});
    }
  }
  return out;
}

void require_valid(const ModelSpec& spec, bool allow_degenerate) {
  ValidationReport report = validate_assumption1(spec);
  if (report.passed()) return;
  if (allow_degenerate) {
    ValidationReport structural;
    for (const Finding& f : report.findings) {
      if (f.clause.starts_with(kAmplitudeClause) || f.clause.starts_with(kInitialClause)) {
        structural.findings.push_back(f);
      }
    }
    if (structural.passed()) return;
    throw AssumptionViolation(std::move(structural));
  }
  throw AssumptionViolation(std::move(report));
}

}  // namespace ppjump
