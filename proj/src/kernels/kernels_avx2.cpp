// Compiled with -mavx2 (and without FMA contraction) when the target is
// x86-64; callers reach these functions only through avx2_table(), which
// checks the running CPU first.

#include "ttl/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__)

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace ttl::kernels {

double idm_one(double gap, double v, double v_lead, const IdmArgs& p);

namespace {

void envelope_avx2(std::span<const double> previous, std::span<double> out,
                   const EnvelopeArgs& args) {
  const std::size_t n = previous.size();
  const std::size_t s = args.source_index;
  const __m256d source = _mm256_set1_pd(static_cast<double>(s));
  const __m256d res = _mm256_set1_pd(args.resolution);
  const __m256d achieved = _mm256_set1_pd(args.achieved);
  const __m256d theta_l = _mm256_set1_pd(args.theta_left);
  const __m256d theta_r = _mm256_set1_pd(args.theta_right);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d index = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  const __m256d four = _mm256_set1_pd(4.0);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d diff = _mm256_sub_pd(source, index);
    const __m256d left = _mm256_cmp_pd(diff, zero, _CMP_GT_OQ);
    const __m256d dist = _mm256_mul_pd(_mm256_andnot_pd(sign_mask, diff), res);
    const __m256d theta = _mm256_blendv_pd(theta_r, theta_l, left);
    const __m256d gap = _mm256_mul_pd(theta, dist);
    const __m256d candidate =
        _mm256_max_pd(_mm256_sub_pd(achieved, gap), zero);
    const __m256d prev = _mm256_loadu_pd(previous.data() + i);
    _mm256_storeu_pd(out.data() + i, _mm256_max_pd(prev, candidate));
    index = _mm256_add_pd(index, four);
  }
  for (; i < n; ++i) {
    double gap;
    if (i < s) {
      gap = args.theta_left * (static_cast<double>(s - i) * args.resolution);
    } else {
      gap = args.theta_right * (static_cast<double>(i - s) * args.resolution);
    }
    out[i] = std::max(previous[i], std::max(args.achieved - gap, 0.0));
  }
  if (s < n) out[s] = args.achieved;
}

double trapezoid_avx2(std::span<const double> values, double h) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 1;
  const std::size_t end = n - 1;
  for (; i + 8 <= end; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(values.data() + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(values.data() + i + 4));
  }
  const __m256d acc = _mm256_add_pd(acc0, acc1);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double interior = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < end; ++i) interior += values[i];
  return h * (0.5 * (values[0] + values[n - 1]) + interior);
}

void idm_avx2(std::span<const double> gap, std::span<const double> speed,
              std::span<const double> leader_speed, const IdmArgs& p,
              std::span<double> accel) {
  const std::size_t n = speed.size();
  if (p.exponent != 4.0) {
    for (std::size_t i = 0; i < n; ++i) {
      accel[i] = idm_one(gap[i], speed[i], leader_speed[i], p);
    }
    return;
  }
  const __m256d denom = _mm256_set1_pd(2.0 * std::sqrt(p.a_max * p.b_comfort));
  const __m256d headway = _mm256_set1_pd(p.time_headway);
  const __m256d s0 = _mm256_set1_pd(p.s0);
  const __m256d v0 = _mm256_set1_pd(p.v_desired);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d a_max = _mm256_set1_pd(p.a_max);
  const __m256d zero = _mm256_setzero_pd();

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(speed.data() + i);
    const __m256d vl = _mm256_loadu_pd(leader_speed.data() + i);
    const __m256d s = _mm256_loadu_pd(gap.data() + i);
    const __m256d dynamic =
        _mm256_add_pd(_mm256_mul_pd(v, headway),
                      _mm256_div_pd(_mm256_mul_pd(v, _mm256_sub_pd(v, vl)),
                                    denom));
    const __m256d s_star = _mm256_add_pd(s0, _mm256_max_pd(dynamic, zero));
    const __m256d r = _mm256_div_pd(v, v0);
    const __m256d r2 = _mm256_mul_pd(r, r);
    const __m256d free_term = _mm256_mul_pd(r2, r2);
    const __m256d q = _mm256_div_pd(s_star, s);
    const __m256d a = _mm256_mul_pd(
        a_max, _mm256_sub_pd(_mm256_sub_pd(one, free_term),
                             _mm256_mul_pd(q, q)));
    _mm256_storeu_pd(accel.data() + i, a);
  }
  for (; i < n; ++i) accel[i] = idm_one(gap[i], speed[i], leader_speed[i], p);
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{"avx2", &envelope_avx2, &trapezoid_avx2,
                                 &idm_avx2};
  if (!__builtin_cpu_supports("avx2")) return nullptr;
  return &table;
}

}  // namespace ttl::kernels

#else

namespace ttl::kernels {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace ttl::kernels

#endif
