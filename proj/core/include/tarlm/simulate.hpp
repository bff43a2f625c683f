#pragma once

#include <cstddef>

#include "tarlm/rng.hpp"
#include "tarlm/time_series.hpp"

namespace tarlm {

/// Default number of pre-sample draws discarded before recording. Ample for
/// mixing at |phi| <= 0.9.
inline constexpr std::size_t kDefaultBurnIn = 500;

/// Simulate n values of the AR(p) process given by params. The recursion
/// starts from p zero states; burn_in draws are generated and discarded
/// before the first recorded value. Pure function of its arguments: the same
/// (params, n, burn_in, key) always yields the same series.
TimeSeries simulate_ar(const ARParams& params, std::size_t n,
                       std::size_t burn_in, RngSeed key);

/// Simulate n values of the TAR(p) process
///   X_t = phi_0 + sum phi_i X_{t-i}
///        + (psi_0 + sum psi_i X_{t-i}) * I(X_{t-d} <= r) + eps_t.
/// Zero initial states, burn_in discarded. With all psi components zero the
/// output is bit-identical to simulate_ar with the base parameters.
TimeSeries simulate_tar(const TARParams& params, std::size_t n,
                        std::size_t burn_in, RngSeed key);

}  // namespace tarlm
