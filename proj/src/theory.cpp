#include "ttl/theory.hpp"

#include <bit>
#include <cmath>
#include <ostream>

#include "ttl/error.hpp"
#include "ttl/format.hpp"

namespace ttl {
namespace {

double theta_of(const GapModel& model) {
  return 0.5 * (model.theta_left + model.theta_right);
}

}  // namespace

const char* to_string(Claim claim) {
  switch (claim) {
    case Claim::kT1: return "T1";
    case Claim::kT2: return "T2";
    case Claim::kT4: return "T4";
    case Claim::kL2: return "L2";
    case Claim::kL3: return "L3";
  }
  return "?";
}

Claim parse_claim(const std::string& text) {
  if (text == "T1") return Claim::kT1;
  if (text == "T2") return Claim::kT2;
  if (text == "T4") return Claim::kT4;
  if (text == "L2") return Claim::kL2;
  if (text == "L3") return Claim::kL3;
  throw Error(ErrorKind::kValidation, "unknown claim '" + text + "'");
}

BoundReport make_report(Claim claim, std::string label, double lhs,
                        double rhs, double scale) {
  const bool holds = lhs <= rhs + 1e-12 * std::abs(scale);
  return {claim, std::move(label), lhs, rhs, holds, rhs - lhs};
}

void write_reports_csv(std::ostream& out,
                       const std::vector<BoundReport>& reports) {
  out << "claim,lhs,rhs,holds,slack\n";
  for (const auto& r : reports) {
    out << to_string(r.claim);
    if (!r.label.empty()) out << '[' << r.label << ']';
    out << ',' << fmt6(r.lhs) << ',' << fmt6(r.rhs) << ','
        << (r.holds ? "true" : "false") << ',' << fmt6(r.slack) << '\n';
  }
}

std::pair<double, double> theorem1_point_and_gain(const Segment& segment,
                                                  const GapModel& model,
                                                  bool is_first) {
  model.validate();
  if (!model.symmetric()) {
    throw Error(ErrorKind::kUnsupportedAssumption,
                "greedy gains need theta_left == theta_right");
  }
  require(segment.left < segment.right, "segment needs left < right");
  const double theta = model.theta_left;
  const double l = segment.length();
  const double mid = 0.5 * (segment.left + segment.right);
  if (is_first) return {mid, 0.75 * theta * l * l};
  switch (segment.slope_class) {
    case SlopeClass::kSymmetricV:
      return {mid, theta * l * l / 8.0};
    case SlopeClass::kPositive:
      return {(2.0 * segment.left + segment.right) / 3.0, theta * l * l / 3.0};
    case SlopeClass::kNegative:
      return {(segment.left + 2.0 * segment.right) / 3.0, theta * l * l / 3.0};
    case SlopeClass::kFlat:
      break;
  }
  return {mid, theta * l * l / 3.0};
}

double asymmetric_vertex_point(const Segment& segment, const GapModel& model) {
  const double tl = model.theta_left;
  const double tr = model.theta_right;
  if (tl + tr == 0.0) return 0.5 * (segment.left + segment.right);
  return (tl * segment.left + tr * segment.right) / (tl + tr);
}

bool is_power_of_two_plus_one(std::size_t k) {
  return k >= 2 && std::has_single_bit(k - 1);
}

double ghost_cell_lower_bound(const HoldRange& range, const GapModel& model,
                              std::size_t k) {
  model.validate();
  if (k == 0) return 0.0;
  double deficit;
  if (k == 1) {
    deficit = 0.25;
  } else if (is_power_of_two_plus_one(k)) {
    const int i = std::countr_zero(k - 1);
    deficit = std::ldexp(1.0, -(i + 2));
  } else {
    // 2^(i-1) + 1 < k < 2^i + 1
    const int i = std::bit_width(k - 1);
    const std::size_t lower = (std::size_t{1} << (i - 1)) + 1;
    deficit = std::ldexp(1.0, -(i + 1)) -
              static_cast<double>(k - lower) * std::ldexp(1.0, -(2 * i + 1));
  }
  const double w = range.width();
  return model.full_area(range) - deficit * theta_of(model) * w * w;
}

std::size_t steps_to_cover(double epsilon) {
  if (!(epsilon > 0.0)) {
    throw Error(ErrorKind::kDivergence,
                "epsilon must be positive; coverage never completes");
  }
  require(epsilon < 1.0, "epsilon must be below 1");
  const double steps = (4.0 * epsilon + 1.0) / (4.0 * epsilon);
  return static_cast<std::size_t>(std::ceil(steps - 1e-12 * steps));
}

double cttl_optimal_area(const HoldRange& range, const GapModel& model,
                         std::size_t k) {
  model.validate();
  require(k >= 1, "CTTL budget must be at least 1");
  const double w = range.width();
  return model.full_area(range) -
         theta_of(model) * w * w / (4.0 * static_cast<double>(k));
}

double suboptimality_bound(const HoldRange& range, const GapModel& model,
                           std::size_t k) {
  model.validate();
  if (k < 2) {
    throw Error(ErrorKind::kUndefinedBound,
                "suboptimality bound needs K >= 2");
  }
  const double w = range.width();
  const double scale = theta_of(model) * w * w;
  const double kk = static_cast<double>(k);
  if (is_power_of_two_plus_one(k)) return scale / (4.0 * kk * (kk - 1.0));
  return scale / (2.0 * (kk - 1.0) * (kk - 1.0));
}

}  // namespace ttl
