#pragma once

// Closed forms for the greedy step, the ghost-cell lower bound on greedy
// coverage, the optimal coarse-to-fine area and the greedy suboptimality
// bound, plus the BoundReport row used by every numerical check.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ttl/landscape.hpp"

namespace ttl {

enum class Claim { kT1, kT2, kT4, kL2, kL3 };

const char* to_string(Claim claim);
Claim parse_claim(const std::string& text);

/// One numerical check of `lhs <= rhs`.
struct BoundReport {
  Claim claim;
  std::string label;  // instance, e.g. "K=3"
  double lhs;
  double rhs;
  bool holds;
  double slack;  // rhs - lhs
};

/// holds == lhs <= rhs + 1e-12 * scale.
BoundReport make_report(Claim claim, std::string label, double lhs,
                        double rhs, double scale);

/// `claim,lhs,rhs,holds,slack`.
void write_reports_csv(std::ostream& out,
                       const std::vector<BoundReport>& reports);

/// (point, marginal area) of the optimal greedy pick inside `segment`.
/// Requires θ_L == θ_R (kUnsupportedAssumption otherwise).
std::pair<double, double> theorem1_point_and_gain(const Segment& segment,
                                                  const GapModel& model,
                                                  bool is_first);

/// Stationary point (θ_L δ_L + θ_R δ_R) / (θ_L + θ_R) of a V-shaped
/// segment for asymmetric slopes. Gains are not defined for that case.
double asymmetric_vertex_point(const Segment& segment, const GapModel& model);

/// Ã_k = A* - c_k θ Δ², with c_1 = 1/4, c_{2^i+1} = 2^-(i+2), and equal
/// steps of 2^-(2i+1) between 2^(i-1)+1 and 2^i+1. Returns 0 for k = 0.
double ghost_cell_lower_bound(const HoldRange& range, const GapModel& model,
                              std::size_t k);

/// ceil((4ε + 1) / (4ε)); kDivergence for ε <= 0.
std::size_t steps_to_cover(double epsilon);

/// A* - θ Δ² / (4K), which is (1 - 1/(4K)) θ Δ² when J* = θ Δ.
double cttl_optimal_area(const HoldRange& range, const GapModel& model,
                         std::size_t k);

/// θΔ²/(4K(K-1)) when K - 1 is a power of two, θΔ²/(2(K-1)²) otherwise.
/// kUndefinedBound for K < 2.
double suboptimality_bound(const HoldRange& range, const GapModel& model,
                           std::size_t k);

bool is_power_of_two_plus_one(std::size_t k);

}  // namespace ttl
