#include "ppjump/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "path_engine.hpp"

namespace ppjump {

void EnsembleParams::validate() const {
  sim.validate();
  if (num_paths < 1) throw std::invalid_argument("ensemble: num_paths must be >= 1");
  if (!(tail_window > 0.0 && tail_window <= 1.0)) {
    throw std::invalid_argument("ensemble: tail_window must lie in (0, 1]");
  }
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 0.0 || checkpoints[i] > sim.horizon) {
      throw std::invalid_argument("ensemble: checkpoints must lie in [0, horizon]");
    }
    if (i > 0 && !(checkpoints[i] > checkpoints[i - 1])) {
      throw std::invalid_argument("ensemble: checkpoints must be strictly increasing");
    }
  }
  for (double th : inverse_orders) {
    if (!(th > 0.0)) throw std::invalid_argument("ensemble: inverse moment orders must be > 0");
  }
  if (!(max_failure_fraction >= 0.0 && max_failure_fraction <= 1.0)) {
    throw std::invalid_argument("ensemble: max_failure_fraction must lie in [0, 1]");
  }
}

std::vector<double> uniform_checkpoints(double horizon, double dt, int count) {
  std::vector<double> out;
  const double steps = std::round(horizon / dt);
  for (int i = 1; i <= count; ++i) {
    double t = i == count ? horizon : std::round(steps * i / count) * dt;
    if (out.empty() || t > out.back()) out.push_back(t);
  }
  return out;
}

double EnsembleSummary::failure_fraction() const {
  return attempted == 0 ? 0.0 : static_cast<double>(failed_paths.size()) / attempted;
}

bool EnsembleSummary::run_failed() const {
  return failure_fraction() > params.max_failure_fraction || completed == 0;
}

std::size_t EnsembleSummary::checkpoint_index(double t) const {
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    if (std::abs(checkpoints[k] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return k;
  }
  throw std::out_of_range("ensemble: no checkpoint at requested time");
}

std::vector<std::size_t> EnsembleSummary::tail_indices() const {
  const double start = (1.0 - params.tail_window) * params.sim.horizon;
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    if (checkpoints[k] >= start - 1e-12) out.push_back(k);
  }
  return out;
}

namespace {

// Records x and the running time average at each checkpoint. The running
// integral is a trapezoid on the jump-adapted grid using the pre-jump value
// at the right end of each substep.
class CheckpointObserver {
 public:
  CheckpointObserver(const std::vector<double>& checkpoints, double tol, double* state,
                     double* average)
      : cps_(checkpoints), tol_(tol), state_(state), average_(average) {}

  void start(const Eigen::Array2d& x0, std::size_t, const std::vector<JumpEvent>&) {
    prev_ = x0;
    while (next_ < cps_.size() && cps_[next_] <= tol_) record(x0, x0);
  }

  void point(double t, const Eigen::Array2d& pre, const Eigen::Array2d& post, std::int64_t) {
    while (next_ < cps_.size() && cps_[next_] < t - tol_) {
      const double c = cps_[next_];
      record(prev_, (integral_ + (c - t_prev_) * prev_) / c);
    }
    integral_ += 0.5 * (t - t_prev_) * (prev_ + pre);
    t_prev_ = t;
    prev_ = post;
    while (next_ < cps_.size() && cps_[next_] <= t + tol_) record(post, integral_ / t);
  }

 private:
  void record(const Eigen::Array2d& x, const Eigen::Array2d& avg) {
    state_[2 * next_] = x[0];
    state_[2 * next_ + 1] = x[1];
    average_[2 * next_] = avg[0];
    average_[2 * next_ + 1] = avg[1];
    ++next_;
  }

  const std::vector<double>& cps_;
  double tol_;
  double* state_;
  double* average_;
  std::size_t next_ = 0;
  double t_prev_ = 0.0;
  Eigen::Array2d prev_ = Eigen::Array2d::Zero();
  Eigen::Array2d integral_ = Eigen::Array2d::Zero();
};

std::vector<double> effective_checkpoints(const EnsembleParams& p) {
  std::vector<double> cps = p.checkpoints;
  if (cps.empty()) cps = uniform_checkpoints(p.sim.horizon, p.sim.dt, 16);
  if (cps.back() < p.sim.horizon) cps.push_back(p.sim.horizon);
  return cps;
}

}  // namespace

EnsembleSummary run_ensemble(const ModelSpec& spec, const EnsembleParams& params) {
  params.validate();
  EnsembleSummary out;
  out.params = params;
  out.checkpoints = effective_checkpoints(params);
  out.attempted = params.num_paths;
  out.present = {true, !spec.prey_only};

  const std::size_t n = params.num_paths;
  const std::size_t nc = out.checkpoints.size();
  // Row-major scratch: path p occupies [p * 2 * nc, (p + 1) * 2 * nc).
  std::vector<double> state(n * 2 * nc), average(n * 2 * nc);
  std::vector<std::string> failure(n);
  std::vector<char> ok(n, 0);
  const double tol = 1e-9 * params.sim.dt;

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      RngStream rng = rng_stream_for_path(params.sim.seed, p);
      CheckpointObserver obs(out.checkpoints, tol, &state[p * 2 * nc], &average[p * 2 * nc]);
      try {
        if (params.sim.scheme == Scheme::LogEuler) {
          detail::integrate_path<Scheme::LogEuler>(spec, params.sim, rng, obs);
        } else {
          detail::integrate_path<Scheme::DirectEuler>(spec, params.sim, rng, obs);
        }
        ok[p] = 1;
      } catch (const std::runtime_error& e) {
        failure[p] = e.what();
      }
    }
  };

  unsigned threads = params.threads ? params.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    work(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t b = 0; b < n; b += chunk) pool.emplace_back(work, b, std::min(n, b + chunk));
  }

  for (std::size_t p = 0; p < n; ++p) {
    if (!ok[p]) {
      out.failed_paths.push_back(p);
      if (out.first_failure.empty()) out.first_failure = failure[p];
    }
  }
  out.completed = n - out.failed_paths.size();
  const auto rows = static_cast<Eigen::Index>(out.completed);
  const auto cols = static_cast<Eigen::Index>(nc);
  for (std::size_t i = 0; i < 2; ++i) {
    out.state[i].resize(rows, cols);
    out.time_average[i].resize(rows, cols);
  }
  Eigen::Index r = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (!ok[p]) continue;
    for (std::size_t k = 0; k < nc; ++k) {
      for (std::size_t i = 0; i < 2; ++i) {
        out.state[i](r, static_cast<Eigen::Index>(k)) = state[p * 2 * nc + 2 * k + i];
        out.time_average[i](r, static_cast<Eigen::Index>(k)) = average[p * 2 * nc + 2 * k + i];
      }
    }
    ++r;
  }
  return out;
}

Estimate mean_estimate(const Eigen::ArrayXd& samples) {
  const auto n = samples.size();
  if (n == 0) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  double mean = samples.mean();
  if (n < 2) return {mean, 0.0};
  double var = (samples - mean).square().sum() / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

double quantile(Eigen::ArrayXd samples, double q) {
  if (samples.size() == 0) return std::numeric_limits<double>::quiet_NaN();
  std::sort(samples.begin(), samples.end());
  double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(samples.size() - 1);
  auto lo = static_cast<Eigen::Index>(std::floor(pos));
  auto hi = std::min<Eigen::Index>(lo + 1, samples.size() - 1);
  double w = pos - static_cast<double>(lo);
  return samples[lo] + w * (samples[hi] - samples[lo]);
}

namespace {

Eigen::ArrayXd column(const Eigen::ArrayXXd& m, std::size_t k) {
  return m.col(static_cast<Eigen::Index>(k));
}

double fraction(const Eigen::Array<bool, Eigen::Dynamic, 1>& hits) {
  if (hits.size() == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(hits.count()) / static_cast<double>(hits.size());
}

double proportion_error(double p, std::size_t n) {
  return n < 2 ? 0.0 : std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

}  // namespace

Estimate moment(const EnsembleSummary& s, Species sp, std::size_t k, double order) {
  return mean_estimate(column(s.state[index(sp)], k).pow(order));
}

Estimate inverse_moment(const EnsembleSummary& s, Species sp, std::size_t k, double theta) {
  return mean_estimate(column(s.state[index(sp)], k).pow(-theta));
}

Estimate time_average_mean(const EnsembleSummary& s, Species sp, std::size_t k) {
  return mean_estimate(column(s.time_average[index(sp)], k));
}

double time_average_median(const EnsembleSummary& s, Species sp, std::size_t k) {
  return quantile(column(s.time_average[index(sp)], k), 0.5);
}

double occupancy_below(const EnsembleSummary& s, Species sp, std::size_t k, double upper) {
  return fraction(column(s.state[index(sp)], k) <= upper);
}

double occupancy_above(const EnsembleSummary& s, Species sp, std::size_t k, double lower) {
  return fraction(column(s.state[index(sp)], k) >= lower);
}

Eigen::ArrayXd norm_samples(const EnsembleSummary& s, std::size_t k) {
  return (column(s.state[0], k).square() + column(s.state[1], k).square()).sqrt();
}

double norm_exceedance(const EnsembleSummary& s, std::size_t k, double chi) {
  return fraction(norm_samples(s, k) > chi);
}

double extinction_fraction(const EnsembleSummary& s, Species sp, double cutoff) {
  return fraction(column(s.state[index(sp)], s.last()) < cutoff);
}

namespace {

template <class F>
Estimate tail_sup(const EnsembleSummary& s, F&& estimate_at) {
  Estimate best{-std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t k : s.tail_indices()) {
    Estimate e = estimate_at(k);
    if (e.value > best.value) best = e;
  }
  return best;
}

}  // namespace

Estimate tail_sup_moment(const EnsembleSummary& s, Species sp, double order) {
  return tail_sup(s, [&](std::size_t k) { return moment(s, sp, k, order); });
}

Estimate tail_sup_inverse_moment(const EnsembleSummary& s, Species sp, double theta) {
  return tail_sup(s, [&](std::size_t k) { return inverse_moment(s, sp, k, theta); });
}

LogGrowth log_growth_rate(const EnsembleSummary& s, Species sp, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("log growth rate: t must be > 0");
  const std::size_t k = s.checkpoint_index(t);
  Eigen::ArrayXd rates = column(s.state[index(sp)], k).log() / s.checkpoints[k];
  Estimate m = mean_estimate(rates);
  return {m.value, m.std_error, quantile(rates, 0.95), quantile(rates, 0.99)};
}

PermanenceResult permanence_check(const EnsembleSummary& s, Species sp, double eps, double h,
                                  double H) {
  if (!(h < H)) throw std::invalid_argument("permanence check: need h < H");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("permanence check: eps in (0, 1)");
  PermanenceResult out;
  out.upper_margin = std::numeric_limits<double>::infinity();
  out.lower_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k : s.tail_indices()) {
    out.upper_margin = std::min(out.upper_margin, occupancy_below(s, sp, k, H) - (1.0 - eps));
    out.lower_margin = std::min(out.lower_margin, occupancy_above(s, sp, k, h) - (1.0 - eps));
  }
  out.pass = out.upper_margin >= 0.0 && out.lower_margin >= 0.0;
  return out;
}

std::string to_string(PersistenceVerdict v) {
  switch (v) {
    case PersistenceVerdict::NonPersistent:
      return "NonPersistent";
    case PersistenceVerdict::WeaklyPersistent:
      return "WeaklyPersistent";
    case PersistenceVerdict::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

PersistenceResult persistence_in_mean(const EnsembleSummary& s, Species sp,
                                      PersistenceThresholds th) {
  const std::vector<std::size_t> tail = s.tail_indices();
  if (tail.size() < 3) {
    throw std::invalid_argument("persistence in mean: tail window needs >= 3 checkpoints");
  }
  PersistenceResult out;
  bool decreasing = true;
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t k : tail) {
    double v = time_average_mean(s, sp, k).value;
    if (!out.trend.empty() && !(v < out.trend.back().second)) decreasing = false;
    out.trend.emplace_back(s.checkpoints[k], v);
    lowest = std::min(lowest, v);
  }
  out.time_avg_estimate = out.trend.back().second;
  if (decreasing && out.time_avg_estimate < th.non_persistent) {
    out.verdict = PersistenceVerdict::NonPersistent;
  } else if (lowest >= th.weakly_persistent) {
    out.verdict = PersistenceVerdict::WeaklyPersistent;
  }
  Eigen::ArrayXd last = column(s.time_average[index(sp)], s.last());
  out.path_fraction_persistent = fraction(last >= th.weakly_persistent);
  out.path_fraction_vanishing = fraction(last < th.non_persistent);
  return out;
}

EnsembleSummary run_pilot(const ModelSpec& spec, const EnsembleParams& params) {
  EnsembleParams pilot = params;
  pilot.sim.horizon = 0.5 * params.sim.horizon;
  pilot.sim.dt = std::min(params.sim.dt, pilot.sim.horizon);
  pilot.sim.seed = mix64(params.sim.seed ^ 0x70696c6f74ULL);
  pilot.checkpoints = {pilot.sim.horizon};
  return run_ensemble(spec, pilot);
}

Levels quantile_levels(const EnsembleSummary& s, Species sp, std::size_t k, double q_low,
                       double q_high) {
  Eigen::ArrayXd v = column(s.state[index(sp)], k);
  return {quantile(v, q_low), quantile(v, q_high)};
}

namespace {

const char* species_name(std::size_t i) { return i == 0 ? "prey" : "predator"; }

struct Row {
  double t;
  std::string species;
  std::string stat;
  std::string param;
  double value;
  std::string std_error;
};

std::vector<Row> summary_rows(const EnsembleSummary& s) {
  std::vector<Row> rows;
  const EnsembleParams& p = s.params;
  const std::size_t n = s.completed;
  auto se = [](double v) { return format_real(v); };
  for (std::size_t k = 0; k < s.checkpoints.size(); ++k) {
    const double t = s.checkpoints[k];
    for (std::size_t i = 0; i < 2; ++i) {
      if (!s.present[i]) continue;
      const Species sp = kBothSpecies[i];
      const std::string name = species_name(i);
      for (double order : p.moment_orders) {
        Estimate e = moment(s, sp, k, order);
        rows.push_back({t, name, "moment", format_real(order), e.value, se(e.std_error)});
      }
      for (double theta : p.inverse_orders) {
        Estimate e = inverse_moment(s, sp, k, theta);
        rows.push_back({t, name, "inverse_moment", format_real(theta), e.value, se(e.std_error)});
      }
      Estimate avg = time_average_mean(s, sp, k);
      rows.push_back({t, name, "time_average_mean", "", avg.value, se(avg.std_error)});
      rows.push_back({t, name, "time_average_median", "", time_average_median(s, sp, k), ""});
      if (t > 0.0) {
        LogGrowth lg = log_growth_rate(s, sp, t);
        rows.push_back({t, name, "log_growth_mean", "", lg.mean, se(lg.std_error)});
        rows.push_back({t, name, "log_growth_p95", "", lg.p95, ""});
      }
      for (double H : p.upper_levels) {
        double v = occupancy_below(s, sp, k, H);
        rows.push_back({t, name, "prob_le", format_real(H), v, se(proportion_error(v, n))});
      }
      for (double h : p.lower_levels) {
        double v = occupancy_above(s, sp, k, h);
        rows.push_back({t, name, "prob_ge", format_real(h), v, se(proportion_error(v, n))});
      }
      double ext = fraction(column(s.state[i], k) < p.extinction_cutoff);
      rows.push_back({t, name, "below_extinction_cutoff", format_real(p.extinction_cutoff), ext,
                      se(proportion_error(ext, n))});
    }
  }
  return rows;
}

}  // namespace

nlohmann::json to_json(const EnsembleSummary& s) {
  nlohmann::json stats = nlohmann::json::array();
  for (const Row& r : s.completed > 0 ? summary_rows(s) : std::vector<Row>{}) {
    nlohmann::json row = {{"t", r.t}, {"species", r.species}, {"stat", r.stat}, {"value", r.value}};
    if (!r.param.empty()) row["param"] = std::stod(r.param);
    if (!r.std_error.empty()) row["stderr"] = std::stod(r.std_error);
    stats.push_back(std::move(row));
  }
  nlohmann::json tail_sup = nlohmann::json::object();
  if (s.completed > 0) {
    for (std::size_t i = 0; i < 2; ++i) {
      if (!s.present[i]) continue;
      nlohmann::json per = nlohmann::json::array();
      for (double order : s.params.moment_orders) {
        Estimate e = tail_sup_moment(s, kBothSpecies[i], order);
        per.push_back({{"order", order}, {"value", e.value}, {"stderr", e.std_error}});
      }
      for (double theta : s.params.inverse_orders) {
        Estimate e = tail_sup_inverse_moment(s, kBothSpecies[i], theta);
        per.push_back({{"order", -theta}, {"value", e.value}, {"stderr", e.std_error}});
      }
      tail_sup[species_name(i)] = per;
    }
  }
  return {
      {"schema_version", 1},
      {"kind", "ensemble_summary"},
      {"num_paths", s.attempted},
      {"completed", s.completed},
      {"failure_fraction", s.failure_fraction()},
      {"run_failed", s.run_failed()},
      {"first_failure", s.first_failure},
      {"horizon", s.params.sim.horizon},
      {"dt", s.params.sim.dt},
      {"seed", s.params.sim.seed},
      {"scheme", to_string(s.params.sim.scheme)},
      {"tail_window", s.params.tail_window},
      {"checkpoints", s.checkpoints},
      {"tail_sup", tail_sup},
      {"statistics", stats},
  };
}

void write_csv(const EnsembleSummary& s, std::ostream& os) {
  os << "t,species,stat,param,value,stderr\n";
  os << format_real(s.params.sim.horizon) << ",all,failure_fraction,,"
     << format_real(s.failure_fraction()) << ",\n";
  if (s.completed == 0) return;
  for (const Row& r : summary_rows(s)) {
    os << format_real(r.t) << ',' << r.species << ',' << r.stat << ',' << r.param << ','
       << format_real(r.value) << ',' << r.std_error << '\n';
  }
}

}  // namespace ppjump
