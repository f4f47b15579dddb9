#pragma once

// Sequential source-task selection: greedy (GTTL), coarse-to-fine (CTTL),
// random (RTTL) and train-everything (EXHAUSTIVE). Each drives a Trainer and
// folds its results into the landscape with the transfer update.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ttl/error.hpp"
#include "ttl/evaluator.hpp"
#include "ttl/landscape.hpp"
#include "ttl/trainers.hpp"

namespace ttl {

enum class SelectorKind { kGttl, kCttl, kRttl, kExhaustive };

SelectorKind parse_selector(const std::string& text);
const char* to_string(SelectorKind kind);

inline constexpr std::size_t kDefaultBudget = 15;
inline constexpr double kDefaultEpsilon = 0.05;

struct SelectionState {
  std::vector<double> sources;
  std::vector<EvaluatorResult> results;
  Landscape landscape;
  std::vector<double> area_history;  // A_1 .. A_k
  std::size_t budget = kDefaultBudget;
  double epsilon = kDefaultEpsilon;

  SelectionState(const HoldRange& range, std::size_t budget, double epsilon);

  std::size_t iteration() const { return sources.size(); }
  double area() const {
    return area_history.empty() ? 0.0 : area_history.back();
  }
  /// Trains at `delta`, applies the transfer and appends bookkeeping.
  void record(const GapModel& model, const EvaluatorResult& result);
};

/// A trainer failed mid-run; the state holds every completed iteration.
class SelectionError : public Error {
 public:
  SelectionError(const std::string& message, SelectionState partial);
  const SelectionState& partial() const { return partial_; }

 private:
  SelectionState partial_;
};

struct GreedyCandidate {
  Segment segment;
  double point;  // unsnapped in-segment optimum
  double gain;   // estimated marginal area
};

/// Estimated (point, gain) for every current segment; ranking is by gain
/// then by coarser point.
std::vector<GreedyCandidate> greedy_candidates(const Landscape& landscape,
                                               std::span<const double> sources,
                                               const GapModel& model);

/// Next greedy source duration, snapped to the landscape grid and distinct
/// from every selected source.
double find_greedy_transfer_point(const SelectionState& state,
                                  const GapModel& model);

/// K durations from coarse to fine, d_max - (2k+1)/(2K) (d_max - d_min),
/// each snapped to the grid.
std::vector<double> cttl_schedule(const HoldRange& range, std::size_t budget);

SelectionState run_gttl(const Trainer& trainer, const GapModel& model,
                        const HoldRange& range, std::size_t budget,
                        double epsilon, std::uint64_t seed = 0);

SelectionState run_cttl(const Trainer& trainer, const GapModel& model,
                        const HoldRange& range, std::size_t budget,
                        std::uint64_t seed = 0);

SelectionState run_rttl(const Trainer& trainer, const GapModel& model,
                        const HoldRange& range, std::size_t budget,
                        std::uint64_t seed);

/// Trains every grid cell independently (in parallel when `threads` > 1)
/// and merges the results in grid order.
SelectionState run_exhaustive(const Trainer& trainer, const GapModel& model,
                              const HoldRange& range, std::uint64_t seed,
                              unsigned threads = 1);

/// Replays a recorded sequence of (delta, achieved) transfers.
Landscape replay_transfers(const HoldRange& range, const GapModel& model,
                           std::span<const EvaluatorResult> results);

/// `iteration,delta,achieved,area`, one row per training.
void write_iterations_csv(std::ostream& out, const SelectionState& state);

}  // namespace ttl
