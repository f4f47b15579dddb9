#pragma once

#include <string>

namespace ttl {

/// Six significant digits, the precision of every numeric CSV field.
std::string fmt6(double value);

/// Round-trip precision for values that must survive a write/read cycle.
std::string fmt_exact(double value);

}  // namespace ttl
