#pragma once

// Exhaustive search over source sets on a coarse grid under the ideal
// trainer. Independent of every closed form: areas come from applying the
// transfers and integrating.

#include <cstddef>
#include <vector>

#include "ttl/landscape.hpp"
#include "ttl/theory.hpp"

namespace ttl {

inline constexpr std::size_t kMaxOracleCells = 81;
inline constexpr double kMaxOracleSubsets = 1e7;

struct OracleResult {
  std::vector<double> best_sequence;  // ascending durations
  double best_area = 0.0;
  std::size_t evaluated_count = 0;
};

/// C(n, k) as a double (exact below 2^53).
double binomial(std::size_t n, std::size_t k);

/// Best k-subset of a `coarse_cells`-point grid over `range`. The final
/// landscape under equal achieved values depends only on the set, so
/// subsets (not orderings) are enumerated. Ties resolve to the
/// lexicographically smallest subset. Work is split by first element over
/// `threads` workers; the result equals the sequential one.
OracleResult exhaustive_best(const HoldRange& range, const GapModel& model,
                             std::size_t k, std::size_t coarse_cells = 41,
                             unsigned threads = 1);

/// Oracle best area minus greedy area on the same coarse grid, checked
/// against the suboptimality bound plus one cell of slack (zero bound for
/// K = 1).
BoundReport greedy_vs_oracle(const HoldRange& range, const GapModel& model,
                             std::size_t k, std::size_t coarse_cells = 41,
                             unsigned threads = 1);

}  // namespace ttl
