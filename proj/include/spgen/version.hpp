#pragma once

namespace spgen {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace spgen
