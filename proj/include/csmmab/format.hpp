#pragma once

#include <string>

namespace csmmab {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

}  // namespace csmmab
