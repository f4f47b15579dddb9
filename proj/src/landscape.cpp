#include "ttl/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ttl/error.hpp"
#include "ttl/format.hpp"
#include "ttl/kernels.hpp"

namespace ttl {

HoldRange::HoldRange(double d_min, double d_max, double resolution)
    : d_min_(d_min), d_max_(d_max), resolution_(resolution), intervals_(0) {
  require(std::isfinite(d_min) && std::isfinite(d_max) &&
              std::isfinite(resolution),
          "hold range bounds must be finite");
  require(d_min >= 0.0 && d_min < d_max,
          "hold range needs 0 <= d_min < d_max");
  require(resolution > 0.0, "grid resolution must be positive");
  const double cells = (d_max - d_min) / resolution;
  const double whole = std::round(cells);
  require(whole >= 1.0 && std::abs(cells - whole) <= 1e-6 * std::max(1.0, cells),
          "(d_max - d_min) / resolution must be a whole number of cells");
  intervals_ = static_cast<std::size_t>(whole);
}

HoldRange HoldRange::with_cells(double d_min, double d_max, std::size_t cells) {
  require(cells >= 2, "a grid needs at least two cells");
  return HoldRange(d_min, d_max,
                   (d_max - d_min) / static_cast<double>(cells - 1));
}

double HoldRange::at(std::size_t index) const {
  if (index >= intervals_) return d_max_;
  return d_min_ + static_cast<double>(index) * resolution_;
}

std::optional<std::size_t> HoldRange::index_of(double d) const {
  const double r = (d - d_min_) / resolution_;
  const double k = std::round(r);
  if (k < 0.0 || k > static_cast<double>(intervals_)) return std::nullopt;
  if (std::abs(r - k) > 1e-6) return std::nullopt;
  return static_cast<std::size_t>(k);
}

std::size_t HoldRange::snap(double d) const {
  const double r = std::round((d - d_min_) / resolution_);
  if (!(r > 0.0)) return 0;
  if (r >= static_cast<double>(intervals_)) return intervals_;
  return static_cast<std::size_t>(r);
}

bool HoldRange::contains(double d) const {
  const double slack = 1e-9 * resolution_;
  return d >= d_min_ - slack && d <= d_max_ + slack;
}

GapModel GapModel::symmetric_model(double theta, double j_star) {
  GapModel m{theta, theta, j_star};
  m.validate();
  return m;
}

void GapModel::validate() const {
  require(std::isfinite(theta_left) && std::isfinite(theta_right) &&
              std::isfinite(j_star),
          "gap model parameters must be finite");
  require(theta_left >= 0.0 && theta_right >= 0.0,
          "gap slopes must be non-negative");
  require(j_star >= 0.0, "J* must be non-negative");
}

bool GapModel::slope_bounded(const HoldRange& range) const {
  const double bound = j_star / range.width();
  return std::max(theta_left, theta_right) <= bound * (1.0 + 1e-12);
}

double GapModel::full_area(const HoldRange& range) const {
  return range.width() * j_star;
}

double gap(const GapModel& model, double d_source, double d_target) {
  if (d_source > d_target) return model.theta_left * (d_source - d_target);
  if (d_source < d_target) return model.theta_right * (d_target - d_source);
  return 0.0;
}

Landscape::Landscape(const HoldRange& range)
    : range_(range), values_(range.cell_count(), 0.0) {}

Landscape::Landscape(const HoldRange& range, std::vector<double> values,
                     std::size_t generation)
    : range_(range), values_(std::move(values)), generation_(generation) {
  require(values_.size() == range_.cell_count(),
          "landscape needs one value per grid cell");
  for (double v : values_) {
    require(std::isfinite(v) && v >= 0.0,
            "landscape values must be finite and non-negative");
  }
}

double Landscape::at(double d) const {
  const auto i = range_.index_of(d);
  if (!i) {
    throw Error(ErrorKind::kGridAlignment,
                "duration " + fmt6(d) + " is not on the landscape grid");
  }
  return values_[*i];
}

double Landscape::max_value() const {
  return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

Landscape apply_transfer(const Landscape& landscape, const GapModel& model,
                         double d_source, double achieved) {
  model.validate();
  require(std::isfinite(achieved) && achieved >= 0.0,
          "achieved performance must be finite and non-negative");
  const HoldRange& range = landscape.range();
  const auto source = range.index_of(d_source);
  if (!source) {
    throw Error(ErrorKind::kGridAlignment,
                "source duration " + fmt6(d_source) + " is off the grid");
  }
  std::vector<double> out(range.cell_count());
  const kernels::EnvelopeArgs args{*source, range.resolution(), achieved,
                                   model.theta_left, model.theta_right};
  kernels::active().envelope(landscape.values(), out, args);
  return Landscape(range, std::move(out), landscape.generation() + 1);
}

double aggregate_area(const Landscape& landscape) {
  return kernels::active().trapezoid(landscape.values(),
                                     landscape.range().resolution());
}

const char* to_string(SlopeClass c) {
  switch (c) {
    case SlopeClass::kFlat: return "flat";
    case SlopeClass::kSymmetricV: return "symmetric-V";
    case SlopeClass::kPositive: return "positive";
    case SlopeClass::kNegative: return "negative";
  }
  return "?";
}

std::vector<Segment> segments(const Landscape& landscape,
                              std::span<const double> sources) {
  const HoldRange& range = landscape.range();
  std::vector<std::size_t> cuts{0, range.intervals()};
  for (double s : sources) {
    const auto i = range.index_of(s);
    if (!i) {
      throw Error(ErrorKind::kGridAlignment,
                  "source " + fmt6(s) + " is off the landscape grid");
    }
    cuts.push_back(*i);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto v = landscape.values();
  const double tol = 1e-9 * landscape.max_value();
  std::vector<Segment> out;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const std::size_t a = cuts[k];
    const std::size_t b = cuts[k + 1];
    const double vl = v[a];
    const double vr = v[b];
    SlopeClass cls;
    if (std::abs(vl - vr) <= tol) {
      bool constant = true;
      for (std::size_t i = a + 1; i < b; ++i) {
        if (std::abs(v[i] - vl) > tol) {
          constant = false;
          break;
        }
      }
      cls = constant ? SlopeClass::kFlat : SlopeClass::kSymmetricV;
    } else {
      cls = vr > vl ? SlopeClass::kPositive : SlopeClass::kNegative;
    }
    out.push_back({range.at(a), range.at(b), cls});
  }
  return out;
}

void write_landscape_csv(std::ostream& out, const Landscape& landscape) {
  out << "delta,performance\n";
  const HoldRange& r = landscape.range();
  for (std::size_t i = 0; i < r.cell_count(); ++i) {
    out << fmt6(r.at(i)) << ',' << fmt6(landscape.at_index(i)) << '\n';
  }
}

}  // namespace ttl
