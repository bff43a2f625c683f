#pragma once

#include <string>
#include <vector>

#include "tarlm/time_series.hpp"

namespace tarlm {

/// Raw periodogram at the Fourier frequencies j/n, j = 1 .. floor(n/2):
///   power(f_j) = (1/n) | sum_t (X_t - mean) exp(-2 pi i f_j t) |^2.
/// No smoothing or tapering.
struct Periodogram {
  std::vector<double> frequencies;  // in (0, 0.5], strictly increasing
  std::vector<double> power;        // same length, nonnegative

  /// Two-column CSV: frequency,power.
  std::string to_csv() const;
};

/// Compute the raw periodogram. Requires series length >= 8.
Periodogram periodogram(const TimeSeries& series);

}  // namespace tarlm
