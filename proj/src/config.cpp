#include "ppjump/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace ppjump {

namespace {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_real(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw std::invalid_argument("expected a real number, got '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("expected a non-negative integer, got '" + std::string(s) + "'");
  }
  return v;
}

bool parse_bool(std::string_view s) {
  s = trim(s);
  if (s == "true") return true;
  if (s == "false") return false;
  throw std::invalid_argument("expected true or false, got '" + std::string(s) + "'");
}

std::vector<double> parse_reals(std::string_view s) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  for (auto part : split(s, ',')) out.push_back(parse_real(part));
  return out;
}

std::pair<double, double> parse_pair(std::string_view s) {
  auto parts = split(s, ':');
  if (parts.size() != 2) throw std::invalid_argument("expected 'a:b', got '" + std::string(s) + "'");
  return {parse_real(parts[0]), parse_real(parts[1])};
}

std::string real_text(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string join_reals(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + real_text(v[i]);
  return out;
}

// Key/value store that remembers which keys were consumed.
class Entries {
 public:
  void add(std::string key, std::string value, int line) {
    if (values_.count(key)) throw SchemaViolation(key, "duplicate key (line " + std::to_string(line) + ")");
    values_.emplace(std::move(key), std::move(value));
  }

  std::optional<std::string> take(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    used_.insert(key);
    return it->second;
  }

  std::string require(const std::string& key) {
    auto v = take(key);
    if (!v) throw SchemaViolation(key, "required key is missing");
    return *v;
  }

  template <class F>
  auto get(const std::string& key, F&& parse) {
    try {
      return parse(require(key));
    } catch (const std::invalid_argument& e) {
      throw SchemaViolation(key, e.what());
    }
  }

  template <class T, class F>
  T get_or(const std::string& key, T fallback, F&& parse) {
    auto v = take(key);
    if (!v) return fallback;
    try {
      return parse(*v);
    } catch (const std::invalid_argument& e) {
      throw SchemaViolation(key, e.what());
    }
  }

  void reject_unused() const {
    for (const auto& [k, v] : values_) {
      if (!used_.count(k)) throw SchemaViolation(k, "unknown key");
    }
  }

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

Entries tokenize(std::string_view text) {
  Entries entries;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? text.npos : end - start);
    ++line_no;
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw SchemaViolation("line " + std::to_string(line_no), "expected 'key = value'");
    }
    std::string key(trim(line.substr(0, eq)));
    bool ok_key = !key.empty();
    for (char c : key) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) ok_key = false;
    }
    if (!ok_key) throw SchemaViolation("line " + std::to_string(line_no), "malformed key '" + key + "'");
    entries.add(std::move(key), std::string(trim(line.substr(eq + 1))), line_no);
  }
  return entries;
}

std::vector<TimeFunction> parse_time_function_list(std::string_view s) {
  std::vector<TimeFunction> out;
  if (trim(s).empty()) return out;
  for (auto part : split(s, ';')) out.push_back(parse_time_function(part));
  return out;
}

std::vector<JumpAtom> parse_atoms(std::string_view s) {
  std::vector<JumpAtom> out;
  if (trim(s).empty()) return out;
  for (auto part : split(s, ',')) {
    auto [mark, mass] = parse_pair(part);
    out.push_back({mark, mass});
  }
  return out;
}

JumpChannel read_channel(Entries& e, const std::string& prefix, const char* amp_name,
                         bool compensated) {
  const std::string atoms_key = prefix + ".atoms";
  auto atoms = e.get_or(atoms_key, std::vector<JumpAtom>{}, parse_atoms);
  std::array<std::vector<TimeFunction>, 2> amp;
  for (std::size_t i = 0; i < 2; ++i) {
    const std::string key = prefix + "." + amp_name + std::to_string(i + 1);
    amp[i] = atoms.empty() ? e.get_or(key, std::vector<TimeFunction>{}, parse_time_function_list)
                           : e.get(key, parse_time_function_list);
    if (amp[i].size() != atoms.size()) {
      throw SchemaViolation(key, "expected " + std::to_string(atoms.size()) +
                                     " amplitude(s), one per atom, got " +
                                     std::to_string(amp[i].size()));
    }
  }
  try {
    return JumpChannel(FiniteJumpMeasure(std::move(atoms)), std::move(amp), compensated);
  } catch (const std::invalid_argument& ex) {
    throw SchemaViolation(atoms_key, ex.what());
  }
}

Scheme parse_scheme(std::string_view s) {
  s = trim(s);
  if (s == "log_euler") return Scheme::LogEuler;
  if (s == "direct_euler") return Scheme::DirectEuler;
  throw std::invalid_argument("expected log_euler or direct_euler");
}

void emit_channel(std::ostream& os, const JumpChannel& ch, const std::string& prefix,
                  const char* amp_name) {
  if (ch.measure.empty()) return;
  os << prefix << ".atoms = ";
  for (std::size_t k = 0; k < ch.measure.size(); ++k) {
    const JumpAtom& a = ch.measure.atoms()[k];
    os << (k ? ", " : "") << real_text(a.mark) << ":" << real_text(a.mass);
  }
  os << "\n";
  for (std::size_t i = 0; i < 2; ++i) {
    os << prefix << "." << amp_name << (i + 1) << " = ";
    for (std::size_t k = 0; k < ch.amplitude[i].size(); ++k) {
      os << (k ? "; " : "") << emit_time_function(ch.amplitude[i][k]);
    }
    os << "\n";
  }
}

}  // namespace

TimeFunction parse_time_function(std::string_view text) {
  std::string_view s = trim(text);
  auto open = s.find('(');
  if (open == std::string_view::npos || s.back() != ')') {
    throw std::invalid_argument("expected name(args), got '" + std::string(s) + "'");
  }
  std::string_view name = trim(s.substr(0, open));
  std::string_view args = s.substr(open + 1, s.size() - open - 2);
  if (name == "constant") {
    return TimeFunction(Constant{parse_real(args)});
  }
  if (name == "sinusoid") {
    auto v = parse_reals(args);
    if (v.size() != 4) throw std::invalid_argument("sinusoid takes (base, amplitude, omega, phase)");
    return TimeFunction(Sinusoid{v[0], v[1], v[2], v[3]});
  }
  if (name == "piecewise") {
    PiecewiseLinear p;
    for (auto part : split(args, ',')) {
      auto [t, v] = parse_pair(part);
      p.knots.push_back({t, v});
    }
    return TimeFunction(std::move(p));
  }
  throw std::invalid_argument("unknown time function '" + std::string(name) + "'");
}

std::string emit_time_function(const TimeFunction& f) {
  if (const auto* c = std::get_if<Constant>(&f.form())) return "constant(" + real_text(c->value) + ")";
  if (const auto* s = std::get_if<Sinusoid>(&f.form())) {
    return "sinusoid(" + join_reals({s->base, s->amplitude, s->angular_frequency, s->phase}) + ")";
  }
  const auto& p = std::get<PiecewiseLinear>(f.form());
  std::string out = "piecewise(";
  for (std::size_t i = 0; i < p.knots.size(); ++i) {
    out += (i ? ", " : "") + real_text(p.knots[i].time) + ":" + real_text(p.knots[i].value);
  }
  return out + ")";
}

EnsembleParams ScenarioConfig::ensemble_params(unsigned threads) const {
  EnsembleParams p;
  p.num_paths = ensemble.num_paths;
  p.sim = sim;
  p.checkpoints = ensemble.checkpoints.empty()
                      ? uniform_checkpoints(sim.horizon, sim.dt, ensemble.num_checkpoints)
                      : ensemble.checkpoints;
  p.tail_window = ensemble.tail_window;
  p.moment_orders = analysis.p_list;
  p.inverse_orders = analysis.theta_list;
  if (analysis.H) p.upper_levels = {*analysis.H};
  if (analysis.h) p.lower_levels = {*analysis.h};
  p.extinction_cutoff = ensemble.extinction_cutoff;
  p.max_failure_fraction = ensemble.max_failure_fraction;
  p.threads = threads;
  return p;
}

AnalysisParams ScenarioConfig::analysis_params() const {
  AnalysisParams p;
  p.horizon = analysis.horizon.value_or(sim.horizon);
  p.tolerance_band = analysis.tolerance_band;
  p.num_horizons = analysis.num_horizons;
  return p;
}

bool ScenarioConfig::wants(std::string_view format) const {
  for (const auto& f : output.formats) {
    if (f == format) return true;
  }
  return false;
}

ScenarioConfig parse_config(std::string_view text, const LoadOptions& options) {
  Entries e = tokenize(text);
  ScenarioConfig c;

  c.schema_version = static_cast<int>(e.get("schema_version", parse_unsigned));
  if (c.schema_version != kSchemaVersion) {
    throw SchemaViolation("schema_version", "unsupported version " + std::to_string(c.schema_version));
  }
  c.name = e.get_or("scenario.name", std::string{}, [](std::string_view s) { return std::string(trim(s)); });

  auto tf = [](std::string_view s) { return parse_time_function(s); };
  ModelSpec& m = c.model;
  m.a[0] = e.get("model.a1", tf);
  m.a[1] = e.get("model.a2", tf);
  m.b1 = e.get("model.b1", tf);
  m.c[0] = e.get("model.c1", tf);
  m.c[1] = e.get("model.c2", tf);
  m.m = e.get("model.m", tf);
  m.sigma[0] = e.get("model.sigma1", tf);
  m.sigma[1] = e.get("model.sigma2", tf);
  auto x0 = e.get("model.x0", parse_reals);
  if (x0.size() != 2) throw SchemaViolation("model.x0", "expected two initial densities");
  m.x0 = {x0[0], x0[1]};
  m.channel1 = read_channel(e, "model.channel1", "gamma", true);
  m.channel2 = read_channel(e, "model.channel2", "delta", false);

  c.sim.horizon = e.get("sim.horizon", parse_real);
  c.sim.dt = e.get("sim.dt", parse_real);
  c.sim.seed = e.get_or("sim.seed", c.sim.seed, parse_unsigned);
  c.sim.scheme = e.get_or("sim.scheme", c.sim.scheme, parse_scheme);
  try {
    c.sim.validate();
  } catch (const std::invalid_argument& ex) {
    throw SchemaViolation("sim.dt", ex.what());
  }

  EnsembleSettings& en = c.ensemble;
  en.num_paths = e.get_or("ensemble.num_paths", en.num_paths, parse_unsigned);
  en.checkpoints = e.get_or("ensemble.checkpoints", en.checkpoints, parse_reals);
  en.num_checkpoints = static_cast<int>(
      e.get_or("ensemble.num_checkpoints", std::uint64_t(en.num_checkpoints), parse_unsigned));
  en.tail_window = e.get_or("ensemble.tail_window", en.tail_window, parse_real);
  en.extinction_cutoff = e.get_or("ensemble.extinction_cutoff", en.extinction_cutoff, parse_real);
  en.max_failure_fraction =
      e.get_or("ensemble.max_failure_fraction", en.max_failure_fraction, parse_real);
  if (en.num_paths < 1) throw SchemaViolation("ensemble.num_paths", "must be >= 1");
  if (en.num_checkpoints < 1) throw SchemaViolation("ensemble.num_checkpoints", "must be >= 1");

  AnalysisSettings& an = c.analysis;
  auto opt_real = [](std::string_view s) { return std::optional<double>(parse_real(s)); };
  an.horizon = e.get_or("analysis.horizon", an.horizon, opt_real);
  an.tolerance_band = e.get_or("analysis.tolerance_band", an.tolerance_band, opt_real);
  an.num_horizons = static_cast<int>(
      e.get_or("analysis.num_horizons", std::uint64_t(an.num_horizons), parse_unsigned));
  an.theta_list = e.get_or("analysis.theta_list", an.theta_list, parse_reals);
  an.p_list = e.get_or("analysis.p_list", an.p_list, parse_reals);
  an.h = e.get_or("analysis.h", an.h, opt_real);
  an.H = e.get_or("analysis.H", an.H, opt_real);
  an.epsilon = e.get_or("analysis.epsilon", an.epsilon, parse_real);
  an.delta_np = e.get_or("analysis.delta_np", an.delta_np, parse_real);
  an.delta_wp = e.get_or("analysis.delta_wp", an.delta_wp, parse_real);
  an.min_extinct_fraction = e.get_or("analysis.min_extinct_fraction", an.min_extinct_fraction, parse_real);
  if (an.num_horizons < 1) throw SchemaViolation("analysis.num_horizons", "must be >= 1");
  if (an.horizon && !(*an.horizon > 0.0)) throw SchemaViolation("analysis.horizon", "must be > 0");
  if (an.tolerance_band && !(*an.tolerance_band >= 0.0)) {
    throw SchemaViolation("analysis.tolerance_band", "must be >= 0");
  }
  if (!(an.epsilon > 0.0 && an.epsilon < 1.0)) throw SchemaViolation("analysis.epsilon", "must lie in (0, 1)");
  for (double th : an.theta_list) {
    if (!(th > 0.0 && th < 1.0)) throw SchemaViolation("analysis.theta_list", "entries must lie in (0, 1)");
  }
  if (an.h && an.H && !(*an.h < *an.H)) throw SchemaViolation("analysis.h", "need h < H");

  OutputSettings& out = c.output;
  out.directory = e.get_or("output.directory", out.directory,
                           [](std::string_view s) { return std::string(trim(s)); });
  out.formats = e.get_or("output.formats", out.formats, [](std::string_view s) {
    std::vector<std::string> v;
    for (auto part : split(s, ',')) {
      if (part != "csv" && part != "json") throw std::invalid_argument("formats are csv and json");
      v.emplace_back(part);
    }
    return v;
  });
  out.max_saved_paths = e.get_or("output.max_saved_paths", out.max_saved_paths, parse_unsigned);

  c.flags.allow_degenerate = e.get_or("flags.allow_degenerate", false, parse_bool);
  c.flags.prey_only = e.get_or("flags.prey_only", false, parse_bool);
  c.model.prey_only = c.flags.prey_only;

  e.reject_unused();

  try {
    c.ensemble_params().validate();
  } catch (const std::invalid_argument& ex) {
    throw SchemaViolation("ensemble", ex.what());
  }

  require_valid(c.model, c.flags.allow_degenerate || options.force_allow_degenerate);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UnreadableConfig(path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw UnreadableConfig(path.string());
  return parse_config(buf.str(), options);
}

std::string emit_config(const ScenarioConfig& c) {
  std::ostringstream os;
  os << "schema_version = " << c.schema_version << "\n";
  if (!c.name.empty()) os << "scenario.name = " << c.name << "\n";
  const ModelSpec& m = c.model;
  os << "\nmodel.a1 = " << emit_time_function(m.a[0]) << "\n";
  os << "model.a2 = " << emit_time_function(m.a[1]) << "\n";
  os << "model.b1 = " << emit_time_function(m.b1) << "\n";
  os << "model.c1 = " << emit_time_function(m.c[0]) << "\n";
  os << "model.c2 = " << emit_time_function(m.c[1]) << "\n";
  os << "model.m = " << emit_time_function(m.m) << "\n";
  os << "model.sigma1 = " << emit_time_function(m.sigma[0]) << "\n";
  os << "model.sigma2 = " << emit_time_function(m.sigma[1]) << "\n";
  os << "model.x0 = " << join_reals({m.x0[0], m.x0[1]}) << "\n";
  emit_channel(os, m.channel1, "model.channel1", "gamma");
  emit_channel(os, m.channel2, "model.channel2", "delta");

  os << "\nsim.horizon = " << real_text(c.sim.horizon) << "\n";
  os << "sim.dt = " << real_text(c.sim.dt) << "\n";
  os << "sim.seed = " << c.sim.seed << "\n";
  os << "sim.scheme = " << to_string(c.sim.scheme) << "\n";

  const EnsembleSettings& en = c.ensemble;
  os << "\nensemble.num_paths = " << en.num_paths << "\n";
  if (!en.checkpoints.empty()) os << "ensemble.checkpoints = " << join_reals(en.checkpoints) << "\n";
  os << "ensemble.num_checkpoints = " << en.num_checkpoints << "\n";
  os << "ensemble.tail_window = " << real_text(en.tail_window) << "\n";
  os << "ensemble.extinction_cutoff = " << real_text(en.extinction_cutoff) << "\n";
  os << "ensemble.max_failure_fraction = " << real_text(en.max_failure_fraction) << "\n";

  const AnalysisSettings& an = c.analysis;
  os << "\n";
  if (an.horizon) os << "analysis.horizon = " << real_text(*an.horizon) << "\n";
  if (an.tolerance_band) os << "analysis.tolerance_band = " << real_text(*an.tolerance_band) << "\n";
  os << "analysis.num_horizons = " << an.num_horizons << "\n";
  os << "analysis.theta_list = " << join_reals(an.theta_list) << "\n";
  os << "analysis.p_list = " << join_reals(an.p_list) << "\n";
  if (an.h) os << "analysis.h = " << real_text(*an.h) << "\n";
  if (an.H) os << "analysis.H = " << real_text(*an.H) << "\n";
  os << "analysis.epsilon = " << real_text(an.epsilon) << "\n";
  os << "analysis.delta_np = " << real_text(an.delta_np) << "\n";
  os << "analysis.delta_wp = " << real_text(an.delta_wp) << "\n";
  os << "analysis.min_extinct_fraction = " << real_text(an.min_extinct_fraction) << "\n";

  os << "\noutput.directory = " << c.output.directory << "\n";
  os << "output.formats = ";
  for (std::size_t i = 0; i < c.output.formats.size(); ++i) os << (i ? ", " : "") << c.output.formats[i];
  os << "\noutput.max_saved_paths = " << c.output.max_saved_paths << "\n";

  os << "\nflags.allow_degenerate = " << (c.flags.allow_degenerate ? "true" : "false") << "\n";
  os << "flags.prey_only = " << (c.flags.prey_only ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace ppjump
