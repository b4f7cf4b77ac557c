#pragma once

namespace mpsk {

inline constexpr const char* kToolName = "mpskernel";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace mpsk
