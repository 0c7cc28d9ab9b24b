#pragma once

namespace canopy {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace canopy
