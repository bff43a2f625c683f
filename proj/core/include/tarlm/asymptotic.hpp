#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tarlm/rng.hpp"
#include "tarlm/sup_lm.hpp"
#include "tarlm/time_series.hpp"

namespace tarlm {

/// How the covariance kernel of the limit process is plugged in.
///
/// kPivotal (default) is the classical asymptotic test: the grid is mapped
/// to information fractions u(r) and the kernel is the proportional-time
/// bridge min(u1,u2) - u1*u2 per tested coordinate. This is the law behind
/// the standard tabulated sup-LM critical values; it depends only on the
/// number of tested parameters and the search interval. Because the
/// reference law ignores the model-specific kernel shape, the test inherits
/// the well-known small-sample oversize near the unit root.
///
/// kFittedModel evaluates the exact threshold kernel at the stationary
/// moments of the fitted Gaussian AR, in closed form (Yule-Walker
/// autocovariances plus truncated-normal moments). Critical values adapt to
/// the fitted dynamics, which removes most of the oversize.
///
/// kSampleMoments plugs in the observed information sums. The simulated law
/// then matches the statistic's conditional null distribution almost exactly
/// (the kernel diagonal IS the statistic's Schur complement), giving a
/// near-calibrated Monte Carlo test by construction; useful as a diagnostic.
enum class KernelSource { kPivotal, kFittedModel, kSampleMoments };

/// Configuration for simulating the limiting Gaussian-process functional.
struct LimitSimConfig {
  std::size_t n_sim = 10000;          // number of joint Gaussian draws
  std::vector<double> levels = {0.95};
  RngSeed seed;
  std::size_t max_grid = 200;  // thin the grid by even-rank subsampling above
  KernelSource kernel = KernelSource::kPivotal;
};

/// Output of the limit-process simulation: the sorted sup draws plus the
/// requested quantiles.
struct LimitSimResult {
  std::vector<double> sup_draws;        // sorted ascending, size n_sim
  std::vector<double> critical_values;  // one per level
  std::vector<double> levels;
  std::vector<double> grid_used;        // candidates after dedup/thinning

  /// Fraction of sup draws at least as large as the statistic.
  double p_value(double statistic) const;
};

/// Stationary information blocks of the fitted Gaussian AR model, evaluated
/// analytically at the grid candidates and scaled by 1/sigma2 like
/// information_blocks. Entries are E[x_i x_j I(X_{t-d} <= r)] under the
/// fitted stationary law, computed from the Yule-Walker autocovariances and
/// closed-form truncated-normal moments. A fit outside the stationarity
/// region is pulled back to companion spectral radius 0.999 before the
/// moments are evaluated (the clamp only matters for explosive fits, whose
/// statistics are far in the rejection region anyway).
InfoBlocks limit_information_blocks(const ARFit& fit,
                                    const ThresholdGrid& grid);

/// Simulate the null limit of the sup statistic: a centered Gaussian process
/// xi(r) over the grid with the plug-in covariance kernel
///   Sigma(r1, r2) = scale * { J22(r1 ^ r2) - J22(r1) J11^{-1} J22(r2) }
/// where the J blocks come from cfg.kernel (fitted-model moments by default,
/// observed information sums otherwise; the overall scale cancels in the
/// quadratic form). Each draw takes the sup over the grid of
/// xi(r)' Sigma(r,r)^{-1} xi(r). Draw s uses the stream derived from
/// (cfg.seed, s), so results do not depend on the worker count.
/// Throws KernelNotPSD when the assembled joint covariance has an eigenvalue
/// below -1e-8 of its largest one; smaller negatives are clipped to zero.
LimitSimResult simulate_limit_process(const TimeSeries& series,
                                      const ARFit& fit,
                                      const ThresholdGrid& grid,
                                      const LimitSimConfig& cfg,
                                      unsigned threads = 1);

/// Convenience wrapper returning just the level quantiles of the sup draws.
std::vector<double> asymptotic_critical_values(const TimeSeries& series,
                                               const ARFit& fit,
                                               const ThresholdGrid& grid,
                                               const LimitSimConfig& cfg,
                                               unsigned threads = 1);

/// Externally supplied critical values, e.g. published tables, for
/// comparison against the simulated ones. CSV format (with header):
///   dim,pi_lower,pi_upper,level,value
struct CriticalValueTable {
  struct Entry {
    int dim = 0;
    double pi_lower = 0.0;
    double pi_upper = 0.0;
    double level = 0.0;
    double value = 0.0;
  };
  std::vector<Entry> entries;

  std::optional<double> lookup(int dim, double pi_lower, double pi_upper,
                               double level) const;
};

CriticalValueTable load_critical_value_table(const std::string& path);

struct BootstrapSummary {
  double p_value = 0.0;
  std::size_t replicates = 0;  // requested B
  std::size_t successes = 0;
  std::size_t failures = 0;
};

struct AsymptoticSummary {
  std::vector<double> levels;
  std::vector<double> critical_values;
  double p_value = 0.0;  // share of sup draws >= statistic
  std::size_t n_sim = 0;
  std::optional<double> table_critical_value;  // from an external table
};

/// Result of testing one series, in either mode or both.
struct TestReport {
  double statistic = 0.0;
  double argmax_threshold = 0.0;
  std::size_t order = 0;
  bool order_selected_by_aic = false;
  int delay = 1;
  double lower_q = 0.25;
  double upper_q = 0.75;
  std::size_t grid_size = 0;
  std::size_t grid_skipped = 0;
  RngSeed seed;
  std::optional<BootstrapSummary> bootstrap;
  std::optional<AsymptoticSummary> asymptotic;
};

/// Compose suplm_statistic with the limit-process simulation into a report
/// carrying critical values and the simulated p-value.
TestReport asymptotic_test(const TimeSeries& series, std::size_t p, int d,
                           double lower_q, double upper_q,
                           const LimitSimConfig& cfg, unsigned threads = 1);

}  // namespace tarlm
