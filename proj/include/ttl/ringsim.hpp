#pragma once

// Single-lane ring road with Intelligent Driver Model traffic and guided
// vehicles that follow zero-order-hold advisories (acceleration or target
// speed), refreshed once per hold window.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "ttl/error.hpp"
#include "ttl/evaluator.hpp"
#include "ttl/kernels.hpp"

namespace ttl::ring {

struct IdmParams {
  double a_max = 1.0;          // m/s^2
  double b_comfort = 1.5;      // m/s^2
  double v_desired = 30.0;     // m/s
  double s0 = 2.0;             // m
  double time_headway = 1.0;   // s
  double exponent = 4.0;

  void validate() const;
  kernels::IdmArgs args() const;
};

enum class GuidanceMode { kAcceleration, kSpeed };

GuidanceMode parse_mode(const std::string& text);
const char* to_string(GuidanceMode mode);

struct GuidanceParams {
  GuidanceMode mode = GuidanceMode::kSpeed;
  double hold = 0.1;        // s, positive multiple of dt
  double alpha = 0.6;       // 1/s, relaxation toward the commanded speed
  double beta = 0.2;        // 1/s, headway-rate feedback
  double accel_cap = 2.5;   // m/s^2
  int n_speed_levels = 10;
};

struct RingConfig {
  double circumference = 250.0;
  int n_vehicles = 22;
  int n_guided = 1;
  double vehicle_length = 5.0;
  double speed_limit = 10.0;
  double dt = 0.1;
  double warmup = 500.0;
  double horizon = 1000.0;
  IdmParams idm;
  GuidanceParams guidance;
  // Guided vehicles never accelerate harder than IDM would allow at their
  // current headway (the safe-speed rule of the host simulator).
  bool safety_cap = true;

  void validate() const;
  std::size_t hold_steps() const;
  std::size_t warmup_steps() const;
  std::size_t horizon_steps() const;
  std::vector<std::size_t> guided_indices() const;
  bool is_guided(std::size_t vehicle) const;
};

/// Applies `key=value` lines (Table-III style names, `#` comments) on top of
/// `base`. Unknown keys and malformed values raise kParse with a line number.
RingConfig parse_config(std::istream& in, RingConfig base = {});
RingConfig load_config_file(const std::string& path, RingConfig base = {});

struct Observation {
  double ego_speed;
  double leader_speed;
  double headway;
};

/// Maps an observation to a guidance command at each hold boundary.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual double command(const Observation& obs) = 0;
};

/// commanded speed = clamp(w0 + w1*(v_lead - v) + w2*(h - s0 - T*v),
/// 0, speed_limit), rounded to the nearest of n_speed_levels equally spaced
/// levels on [0, speed_limit].
class LinearSpeedPolicy final : public Policy {
 public:
  LinearSpeedPolicy(const RingConfig& config, double w0, double w1, double w2);
  double command(const Observation& obs) override;

  double w0() const { return w0_; }
  double w1() const { return w1_; }
  double w2() const { return w2_; }

 private:
  double w0_, w1_, w2_;
  double speed_limit_, s0_, headway_;
  int levels_;
};

/// Fixed command, ignoring observations.
class ConstantPolicy final : public Policy {
 public:
  explicit ConstantPolicy(double value) : value_(value) {}
  double command(const Observation&) override { return value_; }

 private:
  double value_;
};

/// Plays back a logged command sequence, emitting each entry `repeat`
/// times. Used to re-run a hold-δ trajectory at hold δ/repeat.
class ReplayPolicy final : public Policy {
 public:
  ReplayPolicy(std::vector<double> commands, std::size_t repeat);
  double command(const Observation&) override;

 private:
  std::vector<double> commands_;
  std::size_t repeat_;
  std::size_t cursor_ = 0;
};

struct RingState {
  std::vector<double> positions;  // m, in [0, circumference)
  std::vector<double> speeds;     // m/s
  std::vector<double> held;       // per guided vehicle, current command
  std::size_t step_index = 0;
  std::size_t next_refresh = 0;   // step at which the held command expires
  bool guidance_active = false;

  double time(double dt) const { return static_cast<double>(step_index) * dt; }
};

class CollisionError : public Error {
 public:
  CollisionError(std::size_t follower, std::size_t leader, double time,
                 double gap);
  std::size_t follower() const { return follower_; }
  std::size_t leader() const { return leader_; }

 private:
  std::size_t follower_, leader_;
};

/// Bumper-to-bumper gap from `vehicle` to the one ahead.
double headway(const RingState& state, const RingConfig& config,
               std::size_t vehicle);

/// Speed with zero IDM acceleration at the given bumper-to-bumper gap.
double equilibrium_speed(const IdmParams& idm, double gap);

/// Uniform spacing and equilibrium speed, jittered by the seed
/// (positions ±20% of the mean gap, speeds ±10%).
RingState initial_state(const RingConfig& config, std::uint64_t seed);

/// Acceleration each vehicle would apply in `state`; guided vehicles use
/// their held command when guidance is active.
std::vector<double> accelerations(const RingState& state,
                                  const RingConfig& config);

/// Advances one dt. When `policy` is non-null guidance is active: at hold
/// boundaries every guided vehicle observes and takes a fresh command from
/// the policy, otherwise the held command persists. A null policy lets
/// guided vehicles drive as IDM vehicles (warmup).
RingState step(const RingState& state, const RingConfig& config,
               Policy* policy);

struct TrajectoryRow {
  double t;
  std::size_t vehicle;
  double position;
  double speed;
  double command;  // NaN for unguided vehicles and during warmup
};

struct RolloutResult {
  double mean_speed = 0.0;      // over vehicles and scored steps
  double mean_speed_std = 0.0;  // per-step std across vehicles, averaged
  std::vector<double> commands;  // commands issued to the first guided
                                 // vehicle, one per hold window
  std::vector<TrajectoryRow> trajectory;  // scored steps, when requested
};

RolloutResult rollout(const RingConfig& config, Policy* policy,
                      std::uint64_t seed, bool record_trajectory = false);

/// Mean speed of all vehicles over the scored horizon.
double rollout_measure(const RingConfig& config, Policy* policy,
                       std::uint64_t seed);

void write_trajectory_csv(std::ostream& out,
                          const std::vector<TrajectoryRow>& rows);

struct TrainingOutcome {
  double achieved;
  double w0, w1, w2;
  std::size_t rollouts;
  std::size_t failed_rollouts;
};

/// Seeded black-box search over LinearSpeedPolicy weights maximizing
/// rollout_measure at hold `delta` on the initial condition of `seed`.
/// A stratified grid over constant commands comes first, then local
/// refinement of all three weights around the incumbent.
TrainingOutcome search_policy(RingConfig config, double delta,
                              std::size_t search_budget, std::uint64_t seed);

/// search_policy packaged as a trainer result; cost counts rollouts.
EvaluatorResult train_and_measure(const RingConfig& config, double delta,
                                  std::size_t search_budget,
                                  std::uint64_t seed);

}  // namespace ttl::ring
