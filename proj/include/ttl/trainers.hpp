#pragma once

// Task evaluators: "train a policy at hold duration δ and report what it
// achieves". Selectors see only the Trainer interface.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "ttl/evaluator.hpp"
#include "ttl/landscape.hpp"
#include "ttl/ringsim.hpp"

namespace ttl {

class Trainer {
 public:
  virtual ~Trainer() = default;

  /// Deterministic in (delta, seed). Implementations may be called from
  /// several threads at once.
  virtual EvaluatorResult evaluate(double delta, std::uint64_t seed) const = 0;
  virtual std::string name() const = 0;
};

enum class ProfileKind { kIdealConstant, kDecaying, kNoisy };

struct AnalyticProfile {
  ProfileKind kind = ProfileKind::kIdealConstant;
  double j_star = 1.0;
  double decay = 0.0;  // c: achieved falls to J*(1 - c) at d_max
  double noise = 0.0;  // η: uniform perturbation on [-η, η]

  void validate() const;
};

/// Closed-form backend over a declared duration interval.
class AnalyticTrainer final : public Trainer {
 public:
  AnalyticTrainer(AnalyticProfile profile, double d_min, double d_max);

  EvaluatorResult evaluate(double delta, std::uint64_t seed) const override;
  std::string name() const override;
  const AnalyticProfile& profile() const { return profile_; }

 private:
  AnalyticProfile profile_;
  double d_min_, d_max_;
};

/// J* everywhere (trained policies always reach the upper bound).
std::unique_ptr<Trainer> make_ideal_trainer(double j_star, double d_min,
                                            double d_max);

struct CsvRow {
  double delta;
  double performance;
};

/// Replays a `delta,performance` curve: each query answers with the nearest
/// row, provided it lies within half the median row spacing (never more
/// than `max_tolerance` seconds).
class CsvTrainer final : public Trainer {
 public:
  explicit CsvTrainer(std::vector<CsvRow> rows, double max_tolerance = 0.5);

  EvaluatorResult evaluate(double delta, std::uint64_t seed) const override;
  std::string name() const override { return "csv"; }
  const std::vector<CsvRow>& rows() const { return rows_; }
  double tolerance() const { return tolerance_; }

 private:
  std::vector<CsvRow> rows_;
  double tolerance_;
};

/// Parses the landscape CSV format. Errors name the offending line.
std::vector<CsvRow> parse_landscape_csv(std::istream& in);
std::unique_ptr<CsvTrainer> load_csv_landscape(const std::string& path);

/// Ring micro-simulation backend. Durations are rounded to whole multiples
/// of `round_steps` simulation steps (at least one step) before training.
class RingTrainer final : public Trainer {
 public:
  RingTrainer(ring::RingConfig config, std::size_t search_budget,
              std::size_t round_steps = 10);

  EvaluatorResult evaluate(double delta, std::uint64_t seed) const override;
  std::string name() const override { return "ring"; }
  double rounded_hold(double delta) const;

 private:
  ring::RingConfig config_;
  std::size_t search_budget_;
  std::size_t round_steps_;
  mutable std::mutex mutex_;
};

}  // namespace ttl
