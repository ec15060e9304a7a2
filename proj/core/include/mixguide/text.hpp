#pragma once

#include <string>
#include <vector>

namespace mixguide {

// Shortest round-trip decimal form (%.17g re-checked at %.*g widths).
std::string format_g17(double v);

std::string trim(const std::string& s);
std::vector<std::string> split_ws(const std::string& s);
std::vector<std::string> split_list(const std::string& s);  // commas and/or spaces

}  // namespace mixguide
