#pragma once

namespace indiga {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kReportVersion = 1;

}  // namespace indiga
