// SPDX-License-Identifier: MIT
#pragma once

#include <string>

namespace mhjb {

/// Shortest-locale-free rendering with 17 significant digits ('.' decimal
/// separator, round-trips through strtod).
std::string format_double(double value);

}  // namespace mhjb
