#pragma once

#include <string>

namespace atmd {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

}  // namespace atmd
