#include "tarlm/report.hpp"

#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tarlm/version.hpp"

namespace tarlm {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(double x, const char* format = "%.6g") {
  char buf[48];
  std::snprintf(buf, sizeof(buf), format, x);
  return buf;
}

}  // namespace

std::string render_test_report_json(const TestReport& report,
                                    const ReportContext& ctx) {
  ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["library_version"] = kLibraryVersion;
  doc["seed"] = {{"seed", report.seed.seed},
                 {"stream", report.seed.stream_id}};
  doc["series"] = {{"source", ctx.source},
                   {"column", ctx.column},
                   {"sqrt_transform", ctx.sqrt_transform},
                   {"n", ctx.n}};
  doc["test"] = {{"p", report.order},
                 {"order_selected_by_aic", report.order_selected_by_aic},
                 {"d", report.delay},
                 {"qlo", report.lower_q},
                 {"qhi", report.upper_q},
                 {"grid_size", report.grid_size},
                 {"grid_skipped", report.grid_skipped}};
  doc["statistic"] = report.statistic;
  doc["argmax_threshold"] = report.argmax_threshold;
  doc["alpha"] = ctx.alpha;
  if (report.bootstrap) {
    const auto& b = *report.bootstrap;
    doc["bootstrap"] = {{"B", b.replicates},
                        {"successes", b.successes},
                        {"failures", b.failures},
                        {"p_value", b.p_value},
                        {"reject", b.p_value < ctx.alpha}};
  }
  if (report.asymptotic) {
    const auto& a = *report.asymptotic;
    ordered_json asym = {{"n_sim", a.n_sim},
                         {"levels", a.levels},
                         {"critical_values", a.critical_values},
                         {"p_value", a.p_value},
                         {"reject", a.p_value < ctx.alpha}};
    if (a.table_critical_value) {
      asym["table_critical_value"] = *a.table_critical_value;
    }
    doc["asymptotic"] = std::move(asym);
  }
  return doc.dump(2) + "\n";
}

std::string render_test_report_text(const TestReport& report,
                                    const ReportContext& ctx) {
  std::ostringstream out;
  out << "series: " << ctx.source << "  column=" << ctx.column
      << "  n=" << ctx.n << (ctx.sqrt_transform ? "  transform=sqrt" : "")
      << "\n";
  out << "order: p=" << report.order
      << (report.order_selected_by_aic ? " (selected by AIC)" : " (fixed)")
      << "  delay: d=" << report.delay << "\n";
  out << "grid: " << report.grid_size << " candidates between quantiles ("
      << fmt(report.lower_q, "%.4g") << ", " << fmt(report.upper_q, "%.4g")
      << "), " << report.grid_skipped << " skipped\n";
  out << "supLM statistic: " << fmt(report.statistic) << "  at threshold "
      << fmt(report.argmax_threshold) << "\n";
  if (report.bootstrap) {
    const auto& b = *report.bootstrap;
    out << "bootstrap: B=" << b.replicates << "  p-value=" << fmt(b.p_value)
        << "  (failures: " << b.failures << ")\n";
  }
  if (report.asymptotic) {
    const auto& a = *report.asymptotic;
    out << "asymptotic: n_sim=" << a.n_sim << "  p-value=" << fmt(a.p_value);
    for (std::size_t i = 0; i < a.levels.size(); ++i) {
      out << "  cv" << fmt(100.0 * a.levels[i], "%.0f") << "="
          << fmt(a.critical_values[i]);
    }
    if (a.table_critical_value) {
      out << "  table_cv=" << fmt(*a.table_critical_value);
    }
    out << "\n";
  }
  out << "seed: (" << report.seed.seed << ", " << report.seed.stream_id
      << ")\n";
  const bool reject_boot =
      report.bootstrap && report.bootstrap->p_value < ctx.alpha;
  const bool reject_asym =
      report.asymptotic && report.asymptotic->p_value < ctx.alpha;
  out << "decision at alpha=" << fmt(ctx.alpha, "%.4g") << ": ";
  if (report.bootstrap && report.asymptotic) {
    out << (reject_boot ? "reject H0 (bootstrap)" : "keep H0 (bootstrap)")
        << ", "
        << (reject_asym ? "reject H0 (asymptotic)" : "keep H0 (asymptotic)");
  } else if (report.bootstrap) {
    out << (reject_boot ? "reject H0" : "keep H0");
  } else {
    out << (reject_asym ? "reject H0" : "keep H0");
  }
  out << "\n";
  return out.str();
}

}  // namespace tarlm
