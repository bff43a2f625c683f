#include "tarlm/simulate.hpp"

#include <cmath>
#include <stdexcept>

namespace tarlm {

TimeSeries::TimeSeries(std::vector<double> v, std::string lab)
    : values(std::move(v)), label(std::move(lab)) {
  if (values.empty()) {
    throw std::invalid_argument("TimeSeries: at least one value required");
  }
  for (double x : values) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument("TimeSeries: values must be finite");
    }
  }
}

namespace {

// Shared recursion for AR and TAR. The delta block contributes
// (delta0 + sum delta_i X_{t-i}) * I(X_{t-d} <= r); passing all-zero deltas
// adds exactly +0.0, so the AR path is bit-identical to the gated path with
// zero deltas.
TimeSeries simulate_impl(const ARParams& base, const double* delta0,
                         const double* delta_coeffs, double threshold,
                         std::size_t delay, std::size_t n, std::size_t burn_in,
                         RngSeed key) {
  if (n < 1) {
    throw std::invalid_argument("simulate: n must be >= 1");
  }
  if (!(base.noise_sd > 0.0)) {
    throw std::invalid_argument("simulate: noise_sd must be positive");
  }
  const std::size_t p = base.order();
  const std::size_t lag_span = delta0 ? std::max(p, delay) : p;

  Rng rng(key);
  // history holds the most recent lag_span values, history[0] most recent.
  std::vector<double> history(lag_span, 0.0);
  std::vector<double> out;
  out.reserve(n);

  const std::size_t total = burn_in + n;
  for (std::size_t step = 0; step < total; ++step) {
    double mean = base.intercept;
    for (std::size_t i = 0; i < p; ++i) {
      mean += base.coeffs[i] * history[i];
    }
    if (delta0) {
      double gate = 0.0;
      if (history[delay - 1] <= threshold) {
        gate = *delta0;
        for (std::size_t i = 0; i < p; ++i) {
          gate += delta_coeffs[i] * history[i];
        }
      }
      mean += gate;
    }
    const double x = mean + base.noise_sd * rng.normal();
    if (lag_span > 0) {
      for (std::size_t i = lag_span - 1; i > 0; --i) {
        history[i] = history[i - 1];
      }
      history[0] = x;
    }
    if (step >= burn_in) {
      out.push_back(x);
    }
  }
  return TimeSeries(std::move(out));
}

}  // namespace

TimeSeries simulate_ar(const ARParams& params, std::size_t n,
                       std::size_t burn_in, RngSeed key) {
  return simulate_impl(params, nullptr, nullptr, 0.0, 1, n, burn_in, key);
}

TimeSeries simulate_tar(const TARParams& params, std::size_t n,
                        std::size_t burn_in, RngSeed key) {
  if (params.delta_coeffs.size() != params.base.coeffs.size()) {
    throw std::invalid_argument(
        "simulate_tar: delta_coeffs length must equal base.coeffs length");
  }
  if (params.delay < 1) {
    throw std::invalid_argument("simulate_tar: delay must be >= 1");
  }
  return simulate_impl(params.base, &params.delta_intercept,
                       params.delta_coeffs.data(), params.threshold,
                       static_cast<std::size_t>(params.delay), n, burn_in,
                       key);
}

}  // namespace tarlm
