#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tarlm/ar_fit.hpp"
#include "tarlm/rng.hpp"
#include "tarlm/sup_lm.hpp"
#include "tarlm/time_series.hpp"

namespace tarlm {

/// Whether each bootstrap sample gets its own data-driven grid (the default:
/// the interval is re-derived from the sample's quantiles) or reuses the
/// observed series' grid. The frozen variant exists for sensitivity analysis.
enum class GridPolicy { kRefreshPerSample, kFreezeObserved };

struct BootstrapConfig {
  std::size_t replicates = 399;  // B
  RngSeed seed;
  std::size_t p = 1;
  int d = 1;
  double lower_q = 0.25;
  double upper_q = 0.75;
  GridPolicy grid_policy = GridPolicy::kRefreshPerSample;
};

struct BootstrapReport {
  SupLMResult observed;
  std::vector<double> boot_stats;  // successful replicates, in replicate order
  double p_value = 0.0;            // #(boot >= observed) / #successes
  std::vector<std::pair<std::size_t, std::string>> failures;  // (b, reason)
  std::size_t replicates_requested = 0;
};

/// Draw a bootstrap series of length n: innovations resampled uniformly with
/// replacement from the re-centred restricted residuals, fed through the
/// fitted AR recursion. The conditioning prefix of the original sample is
/// kept as-is, so the output aligns with the original length. Throws
/// DegenerateResiduals when the residuals have no spread.
TimeSeries resample_series(const ARFit& fit, std::size_t n, RngSeed key);

/// Full bootstrap test. Replicate b uses the stream derived from
/// (cfg.seed, b); each bootstrap statistic runs through the same
/// suplm_statistic path as the observed one, including the AR refit and (by
/// default) a grid rebuilt from the sample's own quantiles. Replicates that
/// fail statistically are dropped and recorded; more than 5% of them throws
/// TooManyFailures. The report is identical for any worker count.
BootstrapReport bootstrap_test(const TimeSeries& series,
                               const BootstrapConfig& cfg,
                               unsigned threads = 1);

}  // namespace tarlm
