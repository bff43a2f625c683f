#pragma once

#include <string>

#include "tarlm/asymptotic.hpp"

namespace tarlm {

/// Context the CLI attaches to a single-series report.
struct ReportContext {
  std::string source;
  std::string column;
  bool sqrt_transform = false;
  std::size_t n = 0;
  double alpha = 0.05;
};

/// Versioned JSON rendering: embeds the schema version, library version and
/// seed, never wall-clock data, so reruns are byte-identical.
std::string render_test_report_json(const TestReport& report,
                                    const ReportContext& ctx);

std::string render_test_report_text(const TestReport& report,
                                    const ReportContext& ctx);

}  // namespace tarlm
