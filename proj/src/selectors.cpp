#include "ttl/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <ostream>
#include <thread>

#include "ttl/format.hpp"
#include "ttl/random.hpp"

namespace ttl {
namespace {

constexpr std::uint64_t kTrainPurpose = 0x5452414e;   // "TRAN"
constexpr std::uint64_t kRandomPurpose = 0x52545454;  // "RTTT"

// Gains closer than this (relative) are ties.
constexpr double kTieTolerance = 1e-9;

bool better(const GreedyCandidate& a, const GreedyCandidate& b) {
  const double scale = std::max({std::abs(a.gain), std::abs(b.gain), 1e-300});
  if (std::abs(a.gain - b.gain) > kTieTolerance * scale) return a.gain > b.gain;
  return a.point > b.point;
}

EvaluatorResult train(const Trainer& trainer, double delta, std::uint64_t seed,
                      std::size_t iteration, const SelectionState& state) {
  try {
    return trainer.evaluate(delta, derive_seed(seed, kTrainPurpose, iteration));
  } catch (const std::exception& e) {
    throw SelectionError("trainer '" + trainer.name() + "' failed at delta=" +
                             fmt6(delta) + " (iteration " +
                             std::to_string(iteration + 1) + "): " + e.what(),
                         state);
  }
}

void check_budget(std::size_t budget) {
  require(budget >= 1, "transfer budget must be at least 1");
}

}  // namespace

SelectorKind parse_selector(const std::string& text) {
  if (text == "gttl") return SelectorKind::kGttl;
  if (text == "cttl") return SelectorKind::kCttl;
  if (text == "rttl") return SelectorKind::kRttl;
  if (text == "exhaustive") return SelectorKind::kExhaustive;
  throw Error(ErrorKind::kValidation, "unknown selector '" + text + "'");
}

const char* to_string(SelectorKind kind) {
  switch (kind) {
    case SelectorKind::kGttl: return "gttl";
    case SelectorKind::kCttl: return "cttl";
    case SelectorKind::kRttl: return "rttl";
    case SelectorKind::kExhaustive: return "exhaustive";
  }
  return "?";
}

SelectionState::SelectionState(const HoldRange& range, std::size_t budget_,
                               double epsilon_)
    : landscape(range), budget(budget_), epsilon(epsilon_) {}

void SelectionState::record(const GapModel& model,
                            const EvaluatorResult& result) {
  landscape = apply_transfer(landscape, model, result.delta, result.achieved);
  sources.push_back(result.delta);
  results.push_back(result);
  area_history.push_back(aggregate_area(landscape));
}

SelectionError::SelectionError(const std::string& message,
                               SelectionState partial)
    : Error(ErrorKind::kTrainingFailed, message), partial_(std::move(partial)) {}

std::vector<GreedyCandidate> greedy_candidates(const Landscape& landscape,
                                               std::span<const double> sources,
                                               const GapModel& model) {
  model.validate();
  const double theta = 0.5 * (model.theta_left + model.theta_right);
  const bool first = sources.empty();
  std::vector<GreedyCandidate> out;
  for (const Segment& seg : segments(landscape, sources)) {
    const double len = seg.length();
    const double area = theta * len * len;
    double point;
    double gain;
    if (first) {
      point = 0.5 * (seg.left + seg.right);
      gain = 0.75 * area;
    } else {
      switch (seg.slope_class) {
        case SlopeClass::kSymmetricV: {
          const double tl = model.theta_left;
          const double tr = model.theta_right;
          point = tl + tr > 0.0 ? (tl * seg.left + tr * seg.right) / (tl + tr)
                                : 0.5 * (seg.left + seg.right);
          gain = area / 8.0;
          break;
        }
        case SlopeClass::kPositive:
          point = (2.0 * seg.left + seg.right) / 3.0;
          gain = area / 3.0;
          break;
        case SlopeClass::kNegative:
          point = (seg.left + 2.0 * seg.right) / 3.0;
          gain = area / 3.0;
          break;
        case SlopeClass::kFlat:
        default:
          point = 0.5 * (seg.left + seg.right);
          gain = area / 3.0;
          break;
      }
    }
    out.push_back({seg, point, gain});
  }
  std::stable_sort(out.begin(), out.end(), better);
  return out;
}

double find_greedy_transfer_point(const SelectionState& state,
                                  const GapModel& model) {
  const Landscape& land = state.landscape;
  const HoldRange& range = land.range();
  std::vector<bool> taken(range.cell_count(), false);
  for (double s : state.sources) {
    if (const auto i = range.index_of(s)) taken[*i] = true;
  }

  for (const GreedyCandidate& c : greedy_candidates(land, state.sources, model)) {
    const std::size_t idx = range.snap(c.point);
    if (!taken[idx]) return range.at(idx);

    // Snapped onto a selected duration: best free cell in this segment,
    // judged by the area an ideal transfer there would produce.
    const std::size_t lo = range.snap(c.segment.left);
    const std::size_t hi = range.snap(c.segment.right);
    std::optional<std::size_t> best;
    double best_area = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) {
      if (taken[i]) continue;
      const double a =
          aggregate_area(apply_transfer(land, model, range.at(i), model.j_star));
      if (!best || a >= best_area) {
        best = i;
        best_area = a;
      }
    }
    if (best) return range.at(*best);
  }
  throw Error(ErrorKind::kNoSegment,
              "no unselected grid duration remains for a greedy transfer");
}

std::vector<double> cttl_schedule(const HoldRange& range, std::size_t budget) {
  std::vector<double> out;
  const double k_total = static_cast<double>(budget);
  for (std::size_t k = 0; k < budget; ++k) {
    const double raw = range.d_max() - (2.0 * static_cast<double>(k) + 1.0) /
                                           (2.0 * k_total) * range.width();
    const double d = range.snapped(raw);
    if (!out.empty() && d >= out.back()) {
      throw Error(ErrorKind::kValidation,
                  "CTTL budget " + std::to_string(budget) +
                      " is finer than the grid resolution");
    }
    out.push_back(d);
  }
  return out;
}

SelectionState run_gttl(const Trainer& trainer, const GapModel& model,
                        const HoldRange& range, std::size_t budget,
                        double epsilon, std::uint64_t seed) {
  check_budget(budget);
  require(epsilon >= 0.0 && epsilon <= 1.0, "epsilon must lie in [0, 1]");
  model.validate();
  SelectionState state(range, budget, epsilon);
  // Grid sums land within rounding of the exact target.
  const double a_star = model.full_area(range);
  const double target = (1.0 - epsilon) * a_star - 1e-12 * a_star;
  while (state.iteration() < budget && state.area() < target) {
    const double delta = find_greedy_transfer_point(state, model);
    state.record(model, train(trainer, delta, seed, state.iteration(), state));
  }
  return state;
}

SelectionState run_cttl(const Trainer& trainer, const GapModel& model,
                        const HoldRange& range, std::size_t budget,
                        std::uint64_t seed) {
  check_budget(budget);
  model.validate();
  SelectionState state(range, budget, 0.0);
  for (double delta : cttl_schedule(range, budget)) {
    state.record(model, train(trainer, delta, seed, state.iteration(), state));
  }
  return state;
}

SelectionState run_rttl(const Trainer& trainer, const GapModel& model,
                        const HoldRange& range, std::size_t budget,
                        std::uint64_t seed) {
  check_budget(budget);
  model.validate();
  const std::size_t cells = range.cell_count();
  require(budget <= cells, "RTTL budget " + std::to_string(budget) +
                               " exceeds the " + std::to_string(cells) +
                               " grid cells");
  std::vector<std::size_t> pool(cells);
  for (std::size_t i = 0; i < cells; ++i) pool[i] = i;
  Rng rng(derive_seed(seed, kRandomPurpose));
  for (std::size_t i = 0; i < budget; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(cells - i));
    std::swap(pool[i], pool[j]);
  }
  SelectionState state(range, budget, 0.0);
  for (std::size_t i = 0; i < budget; ++i) {
    const double delta = range.at(pool[i]);
    state.record(model, train(trainer, delta, seed, state.iteration(), state));
  }
  return state;
}

SelectionState run_exhaustive(const Trainer& trainer, const GapModel& model,
                              const HoldRange& range, std::uint64_t seed,
                              unsigned threads) {
  model.validate();
  const std::size_t cells = range.cell_count();
  std::vector<std::optional<EvaluatorResult>> results(cells);
  std::vector<std::exception_ptr> errors(cells);

  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < cells; i += stride) {
      try {
        results[i] = trainer.evaluate(range.at(i),
                                      derive_seed(seed, kTrainPurpose, i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned workers = std::max(1u, threads);
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }

  SelectionState state(range, cells, 0.0);
  for (std::size_t i = 0; i < cells; ++i) {
    if (errors[i]) {
      try {
        std::rethrow_exception(errors[i]);
      } catch (const std::exception& e) {
        throw SelectionError("trainer '" + trainer.name() +
                                 "' failed at delta=" + fmt6(range.at(i)) +
                                 ": " + e.what(),
                             state);
      }
    }
    state.record(model, *results[i]);
  }
  return state;
}

Landscape replay_transfers(const HoldRange& range, const GapModel& model,
                           std::span<const EvaluatorResult> results) {
  Landscape land(range);
  for (const auto& r : results) {
    land = apply_transfer(land, model, r.delta, r.achieved);
  }
  return land;
}

void write_iterations_csv(std::ostream& out, const SelectionState& state) {
  out << "iteration,delta,achieved,area\n";
  for (std::size_t k = 0; k < state.results.size(); ++k) {
    out << (k + 1) << ',' << fmt6(state.results[k].delta) << ','
        << fmt6(state.results[k].achieved) << ','
        << fmt6(state.area_history[k]) << '\n';
  }
}

}  // namespace ttl
