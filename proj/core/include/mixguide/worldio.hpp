#pragma once

#include <string>

#include "mixguide/world.hpp"

namespace mixguide {

// Text fixture format, one world per file:
//
//   mixworld 1
//   name <identifier>
//   dim <d>
//   labels <n_content> <n_style>
//   pi <row of n_style weights>            (n_content rows)
//   component <i> <j>
//   mean <d reals>
//   cov <row of d reals>                   (d rows)
//
// Every (i, j) pair needs a component block; order is free. ParseError for
// malformed text, ConstraintError for violated mixture constraints.
World load_world(const std::string& path);
World parse_world(const std::string& text, const std::string& origin = "<text>");
void save_world(const World& world, const std::string& path);
std::string serialize_world(const World& world);

}  // namespace mixguide
