#pragma once

namespace modeinv {

inline constexpr const char* kToolkitName = "modeinv";
inline constexpr const char* kToolkitVersion = "0.1.0";

}  // namespace modeinv
