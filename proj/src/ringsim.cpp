#include "ttl/ringsim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "ttl/format.hpp"
#include "ttl/random.hpp"

namespace ttl::ring {
namespace {

constexpr std::uint64_t kInitPurpose = 0x52494e47;    // "RING"
constexpr std::uint64_t kSearchPurpose = 0x53524348;  // "SRCH"

std::size_t steps_for(double seconds, double dt, const char* what) {
  const double raw = seconds / dt;
  const double rounded = std::round(raw);
  if (std::abs(raw - rounded) > 1e-6 * std::max(1.0, raw)) {
    throw Error(ErrorKind::kValidation,
                std::string(what) + " must be a multiple of dt");
  }
  return static_cast<std::size_t>(rounded);
}

double clamp(double x, double lo, double hi) {
  return std::min(std::max(x, lo), hi);
}

}  // namespace

void IdmParams::validate() const {
  require(a_max > 0 && b_comfort > 0 && v_desired > 0 && s0 > 0 &&
              time_headway > 0 && exponent > 0,
          "IDM parameters must all be positive");
}

kernels::IdmArgs IdmParams::args() const {
  return {a_max, b_comfort, v_desired, s0, time_headway, exponent};
}

GuidanceMode parse_mode(const std::string& text) {
  if (text == "speed") return GuidanceMode::kSpeed;
  if (text == "acceleration" || text == "accel") {
    return GuidanceMode::kAcceleration;
  }
  throw Error(ErrorKind::kValidation, "unknown guidance mode: " + text);
}

const char* to_string(GuidanceMode mode) {
  return mode == GuidanceMode::kSpeed ? "speed" : "acceleration";
}

void RingConfig::validate() const {
  idm.validate();
  require(n_vehicles >= 1, "n_vehicles must be at least 1");
  require(n_guided >= 0 && n_guided <= n_vehicles,
          "n_guided must lie in [0, n_vehicles]");
  require(vehicle_length > 0, "vehicle_length must be positive");
  require(circumference > n_vehicles * vehicle_length,
          "circumference must exceed n_vehicles * vehicle_length");
  require(dt > 0, "dt must be positive");
  require(speed_limit > 0, "speed_limit must be positive");
  require(warmup >= 0 && horizon > 0, "warmup >= 0 and horizon > 0 required");
  require(guidance.hold > 0, "hold duration must be positive");
  require(guidance.alpha >= 0 && guidance.beta >= 0,
          "speed-guidance gains must be non-negative");
  require(guidance.accel_cap > 0, "acceleration capacity must be positive");
  require(guidance.n_speed_levels >= 2, "need at least two speed levels");
  hold_steps();
  warmup_steps();
  horizon_steps();
}

std::size_t RingConfig::hold_steps() const {
  const std::size_t steps = steps_for(guidance.hold, dt, "hold duration");
  require(steps >= 1, "hold duration must be at least one step");
  return steps;
}

std::size_t RingConfig::warmup_steps() const {
  return steps_for(warmup, dt, "warmup");
}

std::size_t RingConfig::horizon_steps() const {
  return steps_for(horizon, dt, "horizon");
}

std::vector<std::size_t> RingConfig::guided_indices() const {
  std::vector<std::size_t> out;
  for (int g = 0; g < n_guided; ++g) {
    out.push_back(static_cast<std::size_t>(g) *
                  static_cast<std::size_t>(n_vehicles) /
                  static_cast<std::size_t>(n_guided));
  }
  return out;
}

bool RingConfig::is_guided(std::size_t vehicle) const {
  const auto idx = guided_indices();
  return std::find(idx.begin(), idx.end(), vehicle) != idx.end();
}

RingConfig parse_config(std::istream& in, RingConfig base) {
  RingConfig c = base;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    const auto where = "config line " + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kParse, where + "expected key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto number = [&]() {
      try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
      } catch (const std::exception&) {
        throw Error(ErrorKind::kParse,
                    where + "bad number for " + key + ": '" + value + "'");
      }
    };
    auto whole = [&]() {
      const double v = number();
      if (v != std::floor(v)) {
        throw Error(ErrorKind::kParse, where + key + " must be a whole number");
      }
      return static_cast<int>(v);
    };

    if (key == "circumference") c.circumference = number();
    else if (key == "total_number_of_vehicles") c.n_vehicles = whole();
    else if (key == "number_of_controlled_vehicles") c.n_guided = whole();
    else if (key == "vehicle_length") c.vehicle_length = number();
    else if (key == "speed_limit") c.speed_limit = number();
    else if (key == "simulation_step") c.dt = number();
    else if (key == "warmup_steps") c.warmup = number();
    else if (key == "timestep_horizon") c.horizon = number();
    else if (key == "maximum_acceleration") c.idm.a_max = number();
    else if (key == "comfortable_deceleration") c.idm.b_comfort = number();
    else if (key == "desired_velocity") c.idm.v_desired = number();
    else if (key == "minimum_spacing") c.idm.s0 = number();
    else if (key == "desired_time_headway") c.idm.time_headway = number();
    else if (key == "exponent") c.idm.exponent = number();
    else if (key == "guidance_mode") c.guidance.mode = parse_mode(value);
    else if (key == "guidance_hold_duration") c.guidance.hold = number();
    else if (key == "speed_gain_alpha") c.guidance.alpha = number();
    else if (key == "headway_gain_beta") c.guidance.beta = number();
    else if (key == "acceleration_capacity") c.guidance.accel_cap = number();
    else if (key == "number_of_discrete_action_space") {
      c.guidance.n_speed_levels = whole();
    } else if (key == "safety_cap") {
      c.safety_cap = whole() != 0;
    } else if (key == "transfer_budget" || key == "termination_criteria") {
      // selector settings, read by the command-line front end
    } else {
      throw Error(ErrorKind::kParse, where + "unknown key '" + key + "'");
    }
  }
  return c;
}

RingConfig load_config_file(const std::string& path, RingConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kParse, "cannot open config file " + path);
  return parse_config(in, base);
}

LinearSpeedPolicy::LinearSpeedPolicy(const RingConfig& config, double w0,
                                     double w1, double w2)
    : w0_(w0),
      w1_(w1),
      w2_(w2),
      speed_limit_(config.speed_limit),
      s0_(config.idm.s0),
      headway_(config.idm.time_headway),
      levels_(config.guidance.n_speed_levels) {}

double LinearSpeedPolicy::command(const Observation& obs) {
  const double raw = w0_ + w1_ * (obs.leader_speed - obs.ego_speed) +
                     w2_ * (obs.headway - s0_ - headway_ * obs.ego_speed);
  const double clamped = clamp(raw, 0.0, speed_limit_);
  const double step = speed_limit_ / static_cast<double>(levels_ - 1);
  const double level = std::round(clamped / step);
  return std::min(level * step, speed_limit_);
}

ReplayPolicy::ReplayPolicy(std::vector<double> commands, std::size_t repeat)
    : commands_(std::move(commands)), repeat_(repeat) {
  require(repeat_ >= 1, "replay repeat must be at least 1");
  require(!commands_.empty(), "replay needs at least one command");
}

double ReplayPolicy::command(const Observation&) {
  const std::size_t i = std::min(cursor_ / repeat_, commands_.size() - 1);
  ++cursor_;
  return commands_[i];
}

CollisionError::CollisionError(std::size_t follower, std::size_t leader,
                               double time, double gap)
    : Error(ErrorKind::kCollision,
            "collision at t=" + fmt6(time) + "s: vehicle " +
                std::to_string(follower) + " reached vehicle " +
                std::to_string(leader) + " (gap " + fmt6(gap) + " m)"),
      follower_(follower),
      leader_(leader) {}

double headway(const RingState& state, const RingConfig& config,
               std::size_t vehicle) {
  const std::size_t n = state.positions.size();
  const std::size_t leader = (vehicle + 1) % n;
  double d = state.positions[leader] - state.positions[vehicle];
  if (d <= 0.0) d += config.circumference;
  return d - config.vehicle_length;
}

double equilibrium_speed(const IdmParams& idm, double gap) {
  if (gap <= idm.s0) return 0.0;
  auto residual = [&](double v) {
    const double q = (idm.s0 + v * idm.time_headway) / gap;
    return 1.0 - std::pow(v / idm.v_desired, idm.exponent) - q * q;
  };
  double lo = 0.0;
  double hi = idm.v_desired;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

RingState initial_state(const RingConfig& config, std::uint64_t seed) {
  config.validate();
  const auto n = static_cast<std::size_t>(config.n_vehicles);
  const double spacing = config.circumference / static_cast<double>(n);
  const double mean_gap = spacing - config.vehicle_length;
  const double v_eq = std::min(equilibrium_speed(config.idm, mean_gap),
                               config.speed_limit);
  Rng rng(derive_seed(seed, kInitPurpose));
  RingState s;
  s.positions.resize(n);
  s.speeds.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double jitter = rng.uniform(-0.2, 0.2) * mean_gap;
    s.positions[i] = static_cast<double>(i) * spacing + jitter;
    if (s.positions[i] < 0.0) s.positions[i] += config.circumference;
  }
  for (std::size_t i = 0; i < n; ++i) {
    s.speeds[i] = v_eq * (1.0 + rng.uniform(-0.1, 0.1));
  }
  s.held.assign(static_cast<std::size_t>(config.n_guided),
                std::numeric_limits<double>::quiet_NaN());
  return s;
}

std::vector<double> accelerations(const RingState& state,
                                  const RingConfig& config) {
  const std::size_t n = state.positions.size();
  std::vector<double> gap(n), leader_speed(n), accel(n);
  for (std::size_t i = 0; i < n; ++i) {
    gap[i] = headway(state, config, i);
    leader_speed[i] = state.speeds[(i + 1) % n];
  }
  const auto idm = config.idm.args();
  kernels::active().idm(gap, state.speeds, leader_speed, idm, accel);

  if (!state.guidance_active) return accel;
  const auto guided = config.guided_indices();
  const auto& g = config.guidance;
  for (std::size_t k = 0; k < guided.size(); ++k) {
    const std::size_t i = guided[k];
    const double v = state.speeds[i];
    double a;
    if (g.mode == GuidanceMode::kSpeed) {
      a = g.alpha * (state.held[k] - v) + g.beta * (leader_speed[i] - v);
    } else {
      a = state.held[k];
    }
    a = clamp(a, -g.accel_cap, g.accel_cap);
    if (config.safety_cap) a = std::min(a, accel[i]);
    accel[i] = a;
  }
  return accel;
}

RingState step(const RingState& state, const RingConfig& config,
               Policy* policy) {
  RingState next = state;
  const std::size_t n = state.positions.size();
  const auto guided = config.guided_indices();

  if (policy != nullptr) {
    if (!state.guidance_active) {
      next.guidance_active = true;
      next.next_refresh = state.step_index;
    }
    if (next.step_index >= next.next_refresh) {
      for (std::size_t k = 0; k < guided.size(); ++k) {
        const std::size_t i = guided[k];
        const Observation obs{state.speeds[i], state.speeds[(i + 1) % n],
                              headway(state, config, i)};
        next.held[k] = policy->command(obs);
      }
      next.next_refresh += config.hold_steps();
    }
  } else {
    next.guidance_active = false;
  }

  const std::vector<double> accel = accelerations(next, config);
  for (std::size_t i = 0; i < n; ++i) {
    const bool capped = next.guidance_active && config.is_guided(i);
    const double v_max = capped ? config.speed_limit : config.idm.v_desired;
    next.speeds[i] = clamp(state.speeds[i] + accel[i] * config.dt, 0.0, v_max);
    double x = state.positions[i] + next.speeds[i] * config.dt;
    if (x >= config.circumference) x -= config.circumference;
    next.positions[i] = x;
  }
  ++next.step_index;

  for (std::size_t i = 0; i < n && n > 1; ++i) {
    const double gap = headway(next, config, i);
    // A follower that passed its leader shows up as a gap near the
    // circumference; per-step motion is far below the vehicle length.
    const double travelled_gap = headway(state, config, i) +
                                 (next.speeds[(i + 1) % n] - next.speeds[i]) *
                                     config.dt;
    if (gap <= 0.0 || travelled_gap <= 0.0) {
      throw CollisionError(i, (i + 1) % n, next.time(config.dt),
                           std::min(gap, travelled_gap));
    }
  }
  return next;
}

RolloutResult rollout(const RingConfig& config, Policy* policy,
                      std::uint64_t seed, bool record_trajectory) {
  RingState state = initial_state(config, seed);
  const std::size_t warmup = config.warmup_steps();
  const std::size_t horizon = config.horizon_steps();
  const auto n = static_cast<double>(config.n_vehicles);
  const auto guided = config.guided_indices();

  for (std::size_t t = 0; t < warmup; ++t) state = step(state, config, nullptr);

  RolloutResult result;
  double speed_sum = 0.0;
  double std_sum = 0.0;
  std::size_t last_refresh = std::numeric_limits<std::size_t>::max();
  for (std::size_t t = 0; t < horizon; ++t) {
    state = step(state, config, policy);
    if (policy != nullptr && !guided.empty() &&
        state.next_refresh != last_refresh) {
      last_refresh = state.next_refresh;
      result.commands.push_back(state.held[0]);
    }
    double mean = 0.0;
    for (double v : state.speeds) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : state.speeds) var += (v - mean) * (v - mean);
    speed_sum += mean;
    std_sum += std::sqrt(var / n);
    if (record_trajectory) {
      const double time = state.time(config.dt);
      for (std::size_t i = 0; i < state.speeds.size(); ++i) {
        double command = std::numeric_limits<double>::quiet_NaN();
        if (state.guidance_active) {
          const auto it = std::find(guided.begin(), guided.end(), i);
          if (it != guided.end()) command = state.held[it - guided.begin()];
        }
        result.trajectory.push_back(
            {time, i, state.positions[i], state.speeds[i], command});
      }
    }
  }
  result.mean_speed = speed_sum / static_cast<double>(horizon);
  result.mean_speed_std = std_sum / static_cast<double>(horizon);
  return result;
}

double rollout_measure(const RingConfig& config, Policy* policy,
                       std::uint64_t seed) {
  return rollout(config, policy, seed).mean_speed;
}

void write_trajectory_csv(std::ostream& out,
                          const std::vector<TrajectoryRow>& rows) {
  out << "t,vehicle,pos,speed,command\n";
  for (const auto& r : rows) {
    out << fmt6(r.t) << ',' << r.vehicle << ',' << fmt6(r.position) << ','
        << fmt6(r.speed) << ',';
    if (!std::isnan(r.command)) out << fmt6(r.command);
    out << '\n';
  }
}

TrainingOutcome search_policy(RingConfig config, double delta,
                              std::size_t search_budget, std::uint64_t seed) {
  require(search_budget >= 1, "search budget must be at least 1");
  config.guidance.hold = delta;
  config.validate();

  Rng rng(derive_seed(seed, kSearchPurpose));
  TrainingOutcome best{-std::numeric_limits<double>::infinity(), 0, 0, 0, 0,
                       0};
  std::string last_failure;

  auto evaluate = [&](double w0, double w1, double w2) {
    LinearSpeedPolicy policy(config, w0, w1, w2);
    ++best.rollouts;
    double score;
    try {
      score = rollout_measure(config, &policy, seed);
    } catch (const CollisionError& e) {
      ++best.failed_rollouts;
      last_failure = e.what();
      return false;
    }
    // strict: ties keep the earliest candidate
    if (score > best.achieved) {
      best.achieved = score;
      best.w0 = w0;
      best.w1 = w1;
      best.w2 = w2;
      return true;
    }
    return false;
  };

  // Stratified grid over constant commands.
  const std::size_t grid =
      std::min<std::size_t>(search_budget,
                            static_cast<std::size_t>(
                                config.guidance.n_speed_levels));
  for (std::size_t j = 0; j < grid; ++j) {
    const double u = rng.uniform();
    const double w0 = (static_cast<double>(j) + u) /
                      static_cast<double>(grid) * config.speed_limit;
    evaluate(w0, 0.0, 0.0);
  }

  // (1+1) local refinement with step-size adaptation.
  double scale = 1.0;
  for (std::size_t r = grid; r < search_budget; ++r) {
    const double base0 = std::isfinite(best.achieved) ? best.w0
                                                      : config.speed_limit / 2;
    const double w0 = base0 + scale * rng.uniform(-1.0, 1.0);
    const double w1 = best.w1 + scale * rng.uniform(-0.5, 0.5);
    const double w2 = best.w2 + scale * rng.uniform(-0.1, 0.1);
    if (evaluate(w0, w1, w2)) {
      scale = std::min(2.0, scale * 1.5);
    } else {
      scale = std::max(0.05, scale * 0.7);
    }
  }

  if (!std::isfinite(best.achieved)) {
    throw Error(ErrorKind::kTrainingFailed,
                "all " + std::to_string(best.rollouts) +
                    " rollouts collided at delta=" + fmt6(delta) +
                    "; last: " + last_failure);
  }
  return best;
}

EvaluatorResult train_and_measure(const RingConfig& config, double delta,
                                  std::size_t search_budget,
                                  std::uint64_t seed) {
  const TrainingOutcome t = search_policy(config, delta, search_budget, seed);
  std::ostringstream id;
  id << "ring:" << to_string(config.guidance.mode) << ":w0=" << fmt6(t.w0)
     << ",w1=" << fmt6(t.w1) << ",w2=" << fmt6(t.w2);
  return {delta, t.achieved, id.str(), static_cast<double>(t.rollouts)};
}

}  // namespace ttl::ring
