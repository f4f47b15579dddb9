#pragma once

// Estimated-performance landscape J_k(δ) over a uniform hold-duration grid,
// the linear generalization-gap model, and the zero-shot transfer update.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ttl {

/// Uniform grid of hold durations [d_min, d_max] with spacing `resolution`.
/// Cells are grid points, so a range has intervals() + 1 cells.
class HoldRange {
 public:
  HoldRange(double d_min, double d_max, double resolution);

  /// Grid with `cells` points spanning [d_min, d_max].
  static HoldRange with_cells(double d_min, double d_max, std::size_t cells);

  double d_min() const { return d_min_; }
  double d_max() const { return d_max_; }
  double resolution() const { return resolution_; }
  double width() const { return d_max_ - d_min_; }
  std::size_t intervals() const { return intervals_; }
  std::size_t cell_count() const { return intervals_ + 1; }

  double at(std::size_t index) const;
  /// Index of `d` if it lies on the grid (to 1e-6 of a cell).
  std::optional<std::size_t> index_of(double d) const;
  /// Nearest grid index, clamped to the range.
  std::size_t snap(double d) const;
  double snapped(double d) const { return at(snap(d)); }
  bool contains(double d) const;

  bool operator==(const HoldRange& other) const = default;

 private:
  double d_min_, d_max_, resolution_;
  std::size_t intervals_;
};

/// Linear generalization gap: θ_L per second when transferring to a finer
/// (smaller) duration, θ_R when transferring to a coarser one; J* caps
/// achievable performance.
struct GapModel {
  double theta_left = 0.0;
  double theta_right = 0.0;
  double j_star = 0.0;

  static GapModel symmetric_model(double theta, double j_star);
  void validate() const;
  bool symmetric() const { return theta_left == theta_right; }
  /// max(θ_L, θ_R) <= J* / (d_max - d_min); a violation is only reported.
  bool slope_bounded(const HoldRange& range) const;
  /// A* = (d_max - d_min) J*.
  double full_area(const HoldRange& range) const;
};

/// Performance lost transferring from `d_source` to `d_target`.
double gap(const GapModel& model, double d_source, double d_target);

/// Immutable J_k on a grid. Operations return new landscapes.
class Landscape {
 public:
  /// J_0 ≡ 0.
  explicit Landscape(const HoldRange& range);
  Landscape(const HoldRange& range, std::vector<double> values,
            std::size_t generation);

  const HoldRange& range() const { return range_; }
  std::span<const double> values() const { return values_; }
  std::size_t generation() const { return generation_; }
  double at_index(std::size_t i) const { return values_[i]; }
  /// Value at an on-grid duration; kGridAlignment otherwise.
  double at(double d) const;
  double max_value() const;

  bool operator==(const Landscape& other) const = default;

 private:
  HoldRange range_;
  std::vector<double> values_;
  std::size_t generation_ = 0;
};

/// J_{k+1}(δ) = max(J_k(δ), achieved - gap(d_source, δ)) clamped at 0, with
/// J_{k+1}(d_source) = achieved exactly.
Landscape apply_transfer(const Landscape& landscape, const GapModel& model,
                         double d_source, double achieved);

/// Trapezoidal integral of J over [d_min, d_max].
double aggregate_area(const Landscape& landscape);

enum class SlopeClass { kFlat, kSymmetricV, kPositive, kNegative };

const char* to_string(SlopeClass c);

struct Segment {
  double left;
  double right;
  SlopeClass slope_class;

  double length() const { return right - left; }
};

/// Maximal pieces between consecutive breakpoints (range bounds and the
/// given sources), classified from their endpoint values. Endpoint values
/// within 1e-9 of the landscape maximum count as equal.
std::vector<Segment> segments(const Landscape& landscape,
                              std::span<const double> sources);

/// `delta,performance` with one row per grid cell, 6 significant digits.
void write_landscape_csv(std::ostream& out, const Landscape& landscape);

}  // namespace ttl
