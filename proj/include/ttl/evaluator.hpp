#pragma once

#include <string>

namespace ttl {

/// What a trainer reports after training a policy at one hold duration.
struct EvaluatorResult {
  double delta = 0.0;     // s
  double achieved = 0.0;  // performance of the trained policy at delta
  std::string policy_id;
  double cost = 0.0;      // abstract training effort
};

}  // namespace ttl
