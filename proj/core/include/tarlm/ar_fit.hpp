#pragma once

#include <cstddef>
#include <vector>

#include "tarlm/time_series.hpp"

namespace tarlm {

/// Least-squares / conditional-MLE fit of an AR(p) model.
///
/// The regression runs over rows t = start_row .. n-1 (0-based), conditioning
/// on the observations before start_row. For a plain fit start_row == p; the
/// sup-LM pipeline raises it to max(p, d) so that the threshold variable
/// X_{t-d} exists on every regression row and the score orthogonality is
/// exact on the same sample.
struct ARFit {
  std::size_t order = 0;                 // p
  std::vector<double> coeffs;            // phi_0 .. phi_p, length p+1
  std::vector<double> residuals;         // length n_eff, aligned with rows
  double sigma2 = 0.0;                   // sum(res^2) / (n_eff - p - 1)
  std::size_t n_eff = 0;                 // number of regression rows
  std::vector<double> initial_values;    // the p values before the first row
  std::size_t start_row = 0;             // index of the first regression row
  std::vector<double> conditioning_prefix;  // observed values before start_row

  double rss() const;
};

/// Fit an AR(p) by OLS (Gaussian conditional MLE) over rows t = p .. n-1.
/// Throws InsufficientData when n < p + max(p+2, 10) and SingularDesign when
/// the cross-product matrix has condition number above 1e12.
ARFit fit_ar(const TimeSeries& series, std::size_t p);

/// As fit_ar but conditioning on the first start_row >= p observations; the
/// regression rows are t = start_row .. n-1.
ARFit fit_ar_from(const TimeSeries& series, std::size_t p,
                  std::size_t start_row);

/// Select the AR order by AIC over p in {1, .., p_max}. Every candidate is
/// fit on the common rows t = p_max .. n-1 so the residual sums are
/// comparable; AIC(p) = n_c * ln(RSS_p / n_c) + 2(p+1), ties broken toward
/// the smaller order.
std::size_t select_order_aic(const TimeSeries& series, std::size_t p_max);

}  // namespace tarlm
