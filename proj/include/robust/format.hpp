#pragma once

// Locale-independent number formatting.

#include <string>

namespace robust {

/// Shortest representation that round-trips exactly.
std::string format_double(double v);

/// Fixed number of significant digits (general notation).
std::string format_double(double v, int significant);

/// Parses a full decimal string; returns false on trailing garbage.
bool parse_double(const std::string& s, double& out);

}  // namespace robust
