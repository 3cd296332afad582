#include "ppjump/path_simulation.hpp"

#include <charconv>
#include <ostream>
#include <sstream>

#include "path_engine.hpp"

namespace ppjump {

std::string to_string(Scheme s) { return s == Scheme::LogEuler ? "log_euler" : "direct_euler"; }

void SimParams::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("sim: horizon must be finite and > 0");
  }
  if (!(dt > 0.0) || dt > horizon) throw std::invalid_argument("sim: need 0 < dt <= horizon");
  if (dt > kMaxStep) throw std::invalid_argument("sim: dt must not exceed 0.1");
}

namespace {

std::string describe_failure(const char* what, double t, int species, double v) {
  std::ostringstream os;
  os.precision(17);
  os << what << " at t=" << t << " for species " << species << " (value " << v << ")";
  return os.str();
}

class RecordObserver {
 public:
  explicit RecordObserver(PathRecord& rec) : rec_(rec) {}

  void start(const Eigen::Array2d& x0, std::size_t expected,
             const std::vector<JumpEvent>& events) {
    rec_.jumps = events;
    rec_.grid.reserve(expected);
    rec_.event.reserve(expected);
    rows_.reserve(expected);
    push(0.0, x0, -1);
  }

  void point(double t, const Eigen::Array2d&, const Eigen::Array2d& post, std::int64_t ev) {
    push(t, post, ev);
  }

  void finish() {
    rec_.x.resize(static_cast<Eigen::Index>(rows_.size()), 2);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      rec_.x(static_cast<Eigen::Index>(r), 0) = rows_[r][0];
      rec_.x(static_cast<Eigen::Index>(r), 1) = rows_[r][1];
    }
  }

 private:
  void push(double t, const Eigen::Array2d& x, std::int64_t ev) {
    rec_.grid.push_back(t);
    rows_.push_back({x[0], x[1]});
    rec_.event.push_back(ev);
  }

  PathRecord& rec_;
  std::vector<std::array<double, 2>> rows_;
};

template <Scheme S>
PathRecord run(const ModelSpec& spec, const SimParams& params, std::uint64_t path_index) {
  params.validate();
  PathRecord rec;
  rec.master_seed = params.seed;
  rec.path_index = path_index;
  rec.scheme = S;
  RngStream rng = rng_stream_for_path(params.seed, path_index);
  RecordObserver obs(rec);
  detail::integrate_path<S>(spec, params, rng, obs);
  obs.finish();
  return rec;
}

}  // namespace

PathOverflow::PathOverflow(double t, int sp, double log_state)
    : std::runtime_error(describe_failure("log-state overflow", t, sp, log_state)),
      time(t),
      species(sp) {}

NonPositiveExcursion::NonPositiveExcursion(double t, int sp, double value)
    : std::runtime_error(describe_failure("non-positive excursion", t, sp, value)),
      time(t),
      species(sp) {}

Eigen::Array2d PathRecord::pre_jump(std::size_t k) const {
  Eigen::Array2d post = x.row(static_cast<Eigen::Index>(k)).transpose();
  if (event[k] < 0) return post;
  const JumpEvent& ev = jumps[static_cast<std::size_t>(event[k])];
  return post / (1.0 + Eigen::Array2d(ev.relative_sizes[0], ev.relative_sizes[1]));
}

std::vector<JumpEvent> sample_jump_skeleton(const JumpChannel& channel, int channel_id,
                                            double horizon, RngStream& rng) {
  std::vector<JumpEvent> out;
  const double rate = channel.measure.total_mass();
  if (channel.measure.empty() || !(rate > 0.0)) return out;
  const auto& atoms = channel.measure.atoms();
  double t = rng.exponential(rate);
  while (t <= horizon) {
    double u = rng.uniform() * rate;
    std::size_t k = 0;
    for (double acc = atoms[0].mass; acc < u && k + 1 < atoms.size(); acc += atoms[++k].mass) {
    }
    JumpEvent ev;
    ev.time = t;
    ev.channel = channel_id;
    ev.atom = k;
    ev.relative_sizes = {channel.amplitude[0][k](t), channel.amplitude[1][k](t)};
    out.push_back(ev);
    t += rng.exponential(rate);
  }
  return out;
}

PathRecord simulate_path_log_euler(const ModelSpec& spec, const SimParams& params,
                                   std::uint64_t path_index) {
  return run<Scheme::LogEuler>(spec, params, path_index);
}

PathRecord simulate_path_direct(const ModelSpec& spec, const SimParams& params,
                                std::uint64_t path_index) {
  return run<Scheme::DirectEuler>(spec, params, path_index);
}

PathRecord simulate_path(const ModelSpec& spec, const SimParams& params, std::uint64_t path_index) {
  return params.scheme == Scheme::LogEuler ? simulate_path_log_euler(spec, params, path_index)
                                           : simulate_path_direct(spec, params, path_index);
}

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_csv(const PathRecord& path, std::ostream& os) {
  os << "t,x1,x2,is_jump,channel,atom\n";
  for (std::size_t k = 0; k < path.grid.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    os << format_real(path.grid[k]) << ',' << format_real(path.x(r, 0)) << ','
       << format_real(path.x(r, 1)) << ',';
    if (path.event[k] < 0) {
      os << "0,,\n";
    } else {
      const JumpEvent& ev = path.jumps[static_cast<std::size_t>(path.event[k])];
      os << "1," << ev.channel << ',' << ev.atom << '\n';
    }
  }
}

}  // namespace ppjump
