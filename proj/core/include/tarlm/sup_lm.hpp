#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tarlm/ar_fit.hpp"
#include "tarlm/time_series.hpp"

namespace tarlm {

/// Candidate thresholds for the regime indicator I(X_{t-d} <= r).
///
/// The candidates are distinct observed values of the threshold variable
/// X_{t-d} over the regression sample, restricted to the closed interval
/// between the lower_q and upper_q empirical quantiles of the series
/// (type-7 linear interpolation). The per-threshold statistic is a step
/// function of r that changes only at observed values, so this grid loses
/// nothing relative to a continuum search and the supremum is exact.
struct ThresholdGrid {
  int delay = 1;
  std::vector<double> candidates;  // strictly increasing
  double lower_q = 0.25;
  double upper_q = 0.75;
};

/// Per-threshold blocks of the observed information matrix at the restricted
/// MLE, scaled by 1/sigma2. For this model the off-diagonal block equals the
/// gated block, so only i11 and i22(r) are stored:
///   i22(r)[i][j] = (1/sigma2) * sum_t x_{t,i} x_{t,j} I(X_{t-d} <= r)
/// with x_{t,0} = 1 and x_{t,i} = X_{t-i}; i11 is the same sum without the
/// indicator, i.e. i22(+inf).
struct InfoBlocks {
  Eigen::MatrixXd i11;
  std::vector<Eigen::MatrixXd> i22;  // one per grid candidate, same order
  std::vector<double> candidates;    // copy of the grid for lookup
  std::size_t n_rows = 0;            // regression rows behind the sums
};

struct SkippedThreshold {
  double threshold = 0.0;
  std::string reason;
};

/// Profile of the per-threshold LM statistic and its supremum.
struct SupLMResult {
  double statistic = 0.0;
  double argmax_threshold = 0.0;
  std::vector<std::pair<double, double>> profile;  // (r, T_n(r)), kept points
  std::vector<SkippedThreshold> skipped;
  ARFit fit;
  ThresholdGrid grid;
};

/// Type-7 empirical quantile (linear interpolation of order statistics) of
/// the values. q in [0, 1].
double quantile_type7(std::vector<double> values, double q);

/// Build the candidate grid for delay d. Throws DegenerateGrid when fewer
/// than two distinct candidates survive the bounds.
ThresholdGrid build_grid(const TimeSeries& series, std::size_t p, int d,
                         double lower_q, double upper_q);

/// Information blocks for every grid candidate in one pass over the rows
/// sorted by threshold value (prefix-sum update per grid step).
InfoBlocks information_blocks(const TimeSeries& series, const ARFit& fit,
                              const ThresholdGrid& grid);

/// Score of the gated parameters at the restricted MLE:
///   component j = (1/sigma2) * sum_t res_t x_{t,j} I(X_{t-d} <= r).
Eigen::VectorXd score_psi(const TimeSeries& series, const ARFit& fit,
                          double r, int d);

/// Effective information for the gated parameters after profiling out the
/// linear AR block: i22(r) - i22(r) i11^{-1} i22(r). index addresses the
/// grid candidate. Shared by the statistic and by the limit-process kernel.
Eigen::MatrixXd schur_complement(const InfoBlocks& blocks, std::size_t index);

/// Quadratic form score' S(r)^{-1} score via Cholesky solve. r must be one of
/// the grid candidates held by blocks. Throws SingularAtThreshold when S(r)
/// has condition number above 1e12 (or fails positivity).
double lm_at_threshold(const Eigen::VectorXd& score, const InfoBlocks& blocks,
                       double r);

/// Full pipeline: restricted fit, grid, per-threshold statistics, supremum.
/// Throws AllThresholdsSingular when every candidate is skipped; propagates
/// SingularDesign / InsufficientData / DegenerateGrid.
SupLMResult suplm_statistic(const TimeSeries& series, std::size_t p, int d,
                            double lower_q, double upper_q);

/// As suplm_statistic but with a caller-supplied grid (used by the
/// frozen-grid bootstrap variant). The fit is still recomputed from series.
SupLMResult suplm_statistic_with_grid(const TimeSeries& series, std::size_t p,
                                      const ThresholdGrid& grid);

}  // namespace tarlm
