#pragma once

namespace mixguide {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace mixguide
