#pragma once

#include <string_view>

namespace refcheck {

inline constexpr std::string_view kToolName = "refcheck";
inline constexpr std::string_view kToolVersion = "0.1.0";

}  // namespace refcheck
