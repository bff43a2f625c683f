#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tarlm/errors.hpp"

namespace tarlm {

/// A finite real-valued sequence. Construction validates that the series is
/// nonempty and every value is finite.
struct TimeSeries {
  std::vector<double> values;
  std::string label;

  TimeSeries() = default;
  explicit TimeSeries(std::vector<double> v, std::string lab = {});

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

/// AR(p) parameters: X_t = intercept + sum_i coeffs[i-1] * X_{t-i} + eps_t,
/// eps_t ~ N(0, noise_sd^2). p == coeffs.size() may be zero (white noise).
struct ARParams {
  double intercept = 0.0;
  std::vector<double> coeffs;
  double noise_sd = 1.0;

  std::size_t order() const { return coeffs.size(); }
};

/// TAR(p) parameters. The lower regime adds (delta_intercept + sum_i
/// delta_coeffs[i-1] * X_{t-i}) when X_{t-delay} <= threshold. With all delta
/// components zero the process is exactly the base AR(p).
struct TARParams {
  ARParams base;
  double delta_intercept = 0.0;
  std::vector<double> delta_coeffs;
  double threshold = 0.0;
  int delay = 1;

  std::size_t order() const { return base.order(); }
};

}  // namespace tarlm
