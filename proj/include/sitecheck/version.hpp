#pragma once

namespace sitecheck {

inline constexpr const char* kToolName = "sitecheck";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace sitecheck
