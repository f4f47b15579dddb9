#include <algorithm>
#include <cmath>

#include "ttl/kernels.hpp"

namespace ttl::kernels {
namespace {

void envelope_scalar(std::span<const double> previous, std::span<double> out,
                     const EnvelopeArgs& args) {
  const std::size_t n = previous.size();
  const std::size_t s = args.source_index;
  for (std::size_t i = 0; i < n; ++i) {
    double gap;
    if (i < s) {
      gap = args.theta_left * (static_cast<double>(s - i) * args.resolution);
    } else {
      gap = args.theta_right * (static_cast<double>(i - s) * args.resolution);
    }
    const double candidate = std::max(args.achieved - gap, 0.0);
    out[i] = std::max(previous[i], candidate);
  }
  if (s < n) out[s] = args.achieved;
}

double trapezoid_scalar(std::span<const double> values, double h) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  double interior = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) interior += values[i];
  return h * (0.5 * (values[0] + values[n - 1]) + interior);
}

}  // namespace

double idm_one(double gap, double v, double v_lead, const IdmArgs& p) {
  const double denom = 2.0 * std::sqrt(p.a_max * p.b_comfort);
  const double dynamic = v * p.time_headway + v * (v - v_lead) / denom;
  const double s_star = p.s0 + std::max(dynamic, 0.0);
  const double r = v / p.v_desired;
  double free_term;
  if (p.exponent == 4.0) {
    const double r2 = r * r;
    free_term = r2 * r2;
  } else {
    free_term = std::pow(r, p.exponent);
  }
  const double q = s_star / gap;
  return p.a_max * ((1.0 - free_term) - q * q);
}

namespace {

void idm_scalar(std::span<const double> gap, std::span<const double> speed,
                std::span<const double> leader_speed, const IdmArgs& idm,
                std::span<double> accel) {
  for (std::size_t i = 0; i < speed.size(); ++i) {
    accel[i] = idm_one(gap[i], speed[i], leader_speed[i], idm);
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", &envelope_scalar, &trapezoid_scalar,
                                 &idm_scalar};
  return table;
}

}  // namespace ttl::kernels
