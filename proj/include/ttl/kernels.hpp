#pragma once

// Data-parallel inner loops shared by the landscape and the ring simulator.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The active table is chosen once at startup from the CPU features;
// setting TTL_KERNELS=scalar in the environment forces the reference path.
// Element-wise kernels (envelope, IDM) are bit-identical across variants;
// the reduction (trapezoid) differs only in summation order.

#include <cstddef>
#include <span>
#include <string_view>

namespace ttl::kernels {

/// Parameters of one linear transfer envelope on a uniform grid.
struct EnvelopeArgs {
  std::size_t source_index;  // grid index of the trained duration
  double resolution;         // grid spacing in seconds
  double achieved;           // performance measured at the source
  double theta_left;         // slope toward finer (smaller) durations
  double theta_right;        // slope toward coarser (larger) durations
};

struct IdmArgs {
  double a_max;
  double b_comfort;
  double v_desired;
  double s0;
  double time_headway;
  double exponent;
};

using EnvelopeFn = void (*)(std::span<const double> previous,
                            std::span<double> out, const EnvelopeArgs& args);
using TrapezoidFn = double (*)(std::span<const double> values, double h);
using IdmFn = void (*)(std::span<const double> gap,
                       std::span<const double> speed,
                       std::span<const double> leader_speed,
                       const IdmArgs& idm, std::span<double> accel);

struct KernelTable {
  std::string_view name;
  // out[i] = max(previous[i], max(0, achieved - gap(source, i))).
  EnvelopeFn envelope;
  // Composite trapezoid rule with uniform spacing h.
  TrapezoidFn trapezoid;
  // Intelligent Driver Model acceleration per vehicle.
  IdmFn idm;
};

const KernelTable& scalar_table();

// nullptr when the build or the CPU lacks AVX2.
const KernelTable* avx2_table();

/// Table selected for this process.
const KernelTable& active();

}  // namespace ttl::kernels
