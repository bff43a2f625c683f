#include "tarlm/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "tarlm/parallel.hpp"

namespace tarlm {

TimeSeries resample_series(const ARFit& fit, std::size_t n, RngSeed key) {
  const std::size_t m = fit.residuals.size();
  if (m == 0) {
    throw std::invalid_argument("resample_series: fit has no residuals");
  }
  if (n <= fit.start_row) {
    throw std::invalid_argument(
        "resample_series: n must exceed the conditioning prefix");
  }
  if (fit.conditioning_prefix.size() < fit.start_row) {
    throw std::invalid_argument(
        "resample_series: fit lacks its conditioning prefix");
  }

  double mean = 0.0;
  for (double e : fit.residuals) {
    mean += e;
  }
  mean /= static_cast<double>(m);

  std::vector<double> pool(m);
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    pool[i] = fit.residuals[i] - mean;
    lo = std::min(lo, pool[i]);
    hi = std::max(hi, pool[i]);
  }
  if (hi == lo) {
    throw DegenerateResiduals(
        "resample_series: all re-centred residuals are identical");
  }

  Rng rng(key);
  const std::size_t p = fit.order;
  std::vector<double> out(n);
  for (std::size_t t = 0; t < fit.start_row; ++t) {
    out[t] = fit.conditioning_prefix[t];
  }
  for (std::size_t t = fit.start_row; t < n; ++t) {
    double value = fit.coeffs[0];
    for (std::size_t lag = 1; lag <= p; ++lag) {
      value += fit.coeffs[lag] * out[t - lag];
    }
    value += pool[rng.uniform_below(m)];
    out[t] = value;
  }
  return TimeSeries(std::move(out));
}

BootstrapReport bootstrap_test(const TimeSeries& series,
                               const BootstrapConfig& cfg, unsigned threads) {
  if (cfg.replicates < 1) {
    throw std::invalid_argument("bootstrap_test: replicates must be >= 1");
  }

  BootstrapReport report;
  report.replicates_requested = cfg.replicates;
  report.observed =
      suplm_statistic(series, cfg.p, cfg.d, cfg.lower_q, cfg.upper_q);

  const std::size_t n = series.size();
  std::vector<std::optional<double>> slots(cfg.replicates);
  std::vector<std::string> reasons(cfg.replicates);

  const ARFit& fit = report.observed.fit;
  const ThresholdGrid& observed_grid = report.observed.grid;

  parallel_for(cfg.replicates, threads, [&](std::size_t idx) {
    const std::uint64_t b = static_cast<std::uint64_t>(idx) + 1;
    try {
      TimeSeries resampled = resample_series(fit, n, derive_stream(cfg.seed, b));
      const SupLMResult stat =
          cfg.grid_policy == GridPolicy::kFreezeObserved
              ? suplm_statistic_with_grid(resampled, cfg.p, observed_grid)
              : suplm_statistic(resampled, cfg.p, cfg.d, cfg.lower_q,
                                cfg.upper_q);
      slots[idx] = stat.statistic;
    } catch (const Error& err) {
      reasons[idx] = err.what();
    }
  });

  std::size_t at_least = 0;
  for (std::size_t idx = 0; idx < cfg.replicates; ++idx) {
    if (slots[idx].has_value()) {
      report.boot_stats.push_back(*slots[idx]);
      if (*slots[idx] >= report.observed.statistic) {
        ++at_least;
      }
    } else {
      report.failures.emplace_back(idx + 1, reasons[idx]);
    }
  }

  const double failure_share = static_cast<double>(report.failures.size()) /
                               static_cast<double>(cfg.replicates);
  if (failure_share > 0.05) {
    throw TooManyFailures("bootstrap_test: " +
                          std::to_string(report.failures.size()) + " of " +
                          std::to_string(cfg.replicates) +
                          " replicates failed");
  }
  report.p_value = static_cast<double>(at_least) /
                   static_cast<double>(report.boot_stats.size());
  return report;
}

}  // namespace tarlm
