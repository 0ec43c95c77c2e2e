#pragma once

namespace ctmap {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace ctmap
