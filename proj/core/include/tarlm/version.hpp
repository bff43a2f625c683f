#pragma once

namespace tarlm {

inline constexpr const char* kLibraryVersion = "0.1.0";

// Bumped whenever the JSON report layout changes.
inline constexpr const char* kReportSchemaVersion = "tarlm-report/1";

}  // namespace tarlm
