#pragma once

namespace degroot {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace degroot
