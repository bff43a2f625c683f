#pragma once

#include <stdexcept>
#include <string>

namespace tarlm {

/// Base class for all statistical / configuration failures raised by this
/// library. I/O problems use std::runtime_error directly via IoError below.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too few observations for the requested regression.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// Regression cross-product matrix is numerically singular
/// (condition number above 1e12), e.g. a constant series.
class SingularDesign : public Error {
 public:
  using Error::Error;
};

/// Fewer than two distinct threshold candidates survive the quantile bounds.
class DegenerateGrid : public Error {
 public:
  using Error::Error;
};

/// Schur complement at one grid point is numerically singular; the caller
/// records the point as skipped.
class SingularAtThreshold : public Error {
 public:
  using Error::Error;
};

/// Every grid point was skipped; no statistic can be reported.
class AllThresholdsSingular : public Error {
 public:
  using Error::Error;
};

/// All re-centred residuals are identical; resampling would be constant.
class DegenerateResiduals : public Error {
 public:
  using Error::Error;
};

/// More than 5% of bootstrap replicates failed.
class TooManyFailures : public Error {
 public:
  using Error::Error;
};

/// Joint covariance of the limit process failed factorization beyond the
/// ridge repair.
class KernelNotPSD : public Error {
 public:
  using Error::Error;
};

/// Experiment configuration file violates the documented schema.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File-level problems: unreadable input, malformed CSV cell, etc.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tarlm
