#pragma once

namespace orb {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace orb
