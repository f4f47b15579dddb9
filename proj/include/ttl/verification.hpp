#pragma once

// Numerical certification of the greedy/coarse-to-fine claims on concrete
// instances: closed forms against brute-force oracles and simulated runs.

#include <cstddef>
#include <vector>

#include "ttl/theory.hpp"

namespace ttl {

struct VerifyOptions {
  double d_min = 0.0;
  double d_max = 1.0;
  double theta = 1.0;
  double j_star = 1.0;
  std::size_t oracle_cells = 41;  // coarse grid for exhaustive search
  std::size_t fine_cells = 1001;  // grid for simulated selector runs
  std::size_t k_max = 17;
  std::size_t oracle_k_max = 6;
  unsigned threads = 1;
};

/// Greedy step: oracle first pick vs the midpoint, brute-force best cells
/// in monotone and V segments vs the trisection/midpoint rules, and the
/// measured gains vs the closed-form gains.
std::vector<BoundReport> verify_t1(const VerifyOptions& opt);

/// Ghost-cell closed form at K = 2^i + 1, the steps formula, and greedy
/// coverage within 2^i + 1 iterations at ε = 2^-(i+2).
std::vector<BoundReport> verify_t2(const VerifyOptions& opt);

/// Simulated greedy area against the ghost-cell lower bound, k = 1..k_max,
/// θ in {0.25, 0.5, 1} J*/Δ.
std::vector<BoundReport> verify_l2(const VerifyOptions& opt);

/// Oracle and simulated coarse-to-fine areas against the optimal area.
std::vector<BoundReport> verify_l3(const VerifyOptions& opt);

/// CTTL - GTTL against the suboptimality bound, the bound identity at
/// K = 2^i + 1, and oracle - GTTL where the oracle guard allows.
std::vector<BoundReport> verify_t4(const VerifyOptions& opt);

std::vector<BoundReport> verify_claims(const std::vector<Claim>& claims,
                                       const VerifyOptions& opt);

}  // namespace ttl
