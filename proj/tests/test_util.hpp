// Shared helpers for the test suites: independent long-double oracles for
// the regression algebra, plus small statistics utilities. Everything here
// is deliberately implemented without the library's own linear algebra path
// (plain normal equations + Gaussian elimination) so that agreement between
// the two routes is meaningful.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "tarlm/time_series.hpp"

namespace testutil {

using Matrix = std::vector<std::vector<long double>>;

// Solve A x = b by Gaussian elimination with partial pivoting.
inline std::vector<long double> solve_gauss(Matrix a,
                                            std::vector<long double> b) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < n; ++row) {
      if (std::fabs((double)a[row][col]) > std::fabs((double)a[pivot][col])) {
        pivot = row;
      }
    }
    if (a[pivot][col] == 0.0L) {
      throw std::runtime_error("solve_gauss: singular system");
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t row = col + 1; row < n; ++row) {
      const long double f = a[row][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) {
        a[row][k] -= f * a[col][k];
      }
      b[row] -= f * b[col];
    }
  }
  std::vector<long double> x(n, 0.0L);
  for (std::size_t i = n; i-- > 0;) {
    long double acc = b[i];
    for (std::size_t k = i + 1; k < n; ++k) {
      acc -= a[i][k] * x[k];
    }
    x[i] = acc / a[i][i];
  }
  return x;
}

// OLS through the normal equations in long double. Rows are supplied by a
// callable row(i, out) filling k regressors; y(i) gives the response.
template <typename RowFn, typename YFn>
std::vector<long double> ols_normal_equations(std::size_t rows, std::size_t k,
                                              RowFn row, YFn y) {
  Matrix xtx(k, std::vector<long double>(k, 0.0L));
  std::vector<long double> xty(k, 0.0L);
  std::vector<long double> x(k);
  for (std::size_t i = 0; i < rows; ++i) {
    row(i, x);
    const long double yi = y(i);
    for (std::size_t a = 0; a < k; ++a) {
      xty[a] += x[a] * yi;
      for (std::size_t b = 0; b < k; ++b) {
        xtx[a][b] += x[a] * x[b];
      }
    }
  }
  return solve_gauss(std::move(xtx), std::move(xty));
}

// Residual sum of squares for the same rows and a coefficient vector.
template <typename RowFn, typename YFn>
long double rss_of(std::size_t rows, std::size_t k, RowFn row, YFn y,
                   const std::vector<long double>& beta) {
  long double rss = 0.0L;
  std::vector<long double> x(k);
  for (std::size_t i = 0; i < rows; ++i) {
    row(i, x);
    long double e = y(i);
    for (std::size_t a = 0; a < k; ++a) {
      e -= beta[a] * x[a];
    }
    rss += e * e;
  }
  return rss;
}

struct ArRegression {
  std::size_t start = 0;  // first regression row t
  std::size_t rows = 0;
  std::size_t k = 0;  // p + 1
};

inline ArRegression ar_layout(const tarlm::TimeSeries& series, std::size_t p,
                              int d) {
  ArRegression lay;
  lay.start = std::max(p, static_cast<std::size_t>(d));
  lay.rows = series.size() - lay.start;
  lay.k = p + 1;
  return lay;
}

// Independent LM oracle: T(r) = (RSS0 - RSS1(r)) / sigma2 where RSS1 is the
// auxiliary regression of X_t on the AR regressors plus their indicator-gated
// copies, all over rows t = max(p, d) .. n-1, and
// sigma2 = RSS0 / (rows - p - 1).
inline double lm_oracle(const tarlm::TimeSeries& series, std::size_t p, int d,
                        double r) {
  const auto& v = series.values;
  const ArRegression lay = ar_layout(series, p, d);

  auto base_row = [&](std::size_t i, std::vector<long double>& x) {
    const std::size_t t = lay.start + i;
    x[0] = 1.0L;
    for (std::size_t lag = 1; lag <= p; ++lag) {
      x[lag] = v[t - lag];
    }
  };
  auto yfn = [&](std::size_t i) -> long double { return v[lay.start + i]; };

  const auto beta0 =
      ols_normal_equations(lay.rows, lay.k, base_row, yfn);
  const long double rss0 = rss_of(lay.rows, lay.k, base_row, yfn, beta0);
  const long double sigma2 =
      rss0 / static_cast<long double>(lay.rows - p - 1);

  const std::size_t k2 = 2 * lay.k;
  auto aug_row = [&](std::size_t i, std::vector<long double>& x) {
    const std::size_t t = lay.start + i;
    x[0] = 1.0L;
    for (std::size_t lag = 1; lag <= p; ++lag) {
      x[lag] = v[t - lag];
    }
    const bool gated = v[t - static_cast<std::size_t>(d)] <= r;
    for (std::size_t a = 0; a < lay.k; ++a) {
      x[lay.k + a] = gated ? x[a] : 0.0L;
    }
  };
  const auto beta1 = ols_normal_equations(lay.rows, k2, aug_row, yfn);
  const long double rss1 = rss_of(lay.rows, k2, aug_row, yfn, beta1);
  return static_cast<double>((rss0 - rss1) / sigma2);
}

inline double mean_of(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

inline double variance_of(const std::vector<double>& xs) {
  const double m = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(xs.size() - 1);
}

inline double lag1_autocorrelation(const std::vector<double>& xs) {
  const double m = mean_of(xs);
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    den += (xs[t] - m) * (xs[t] - m);
    if (t + 1 < xs.size()) {
      num += (xs[t] - m) * (xs[t + 1] - m);
    }
  }
  return num / den;
}

// Kolmogorov-Smirnov distance of a sample to Uniform(0,1).
inline double ks_to_uniform(std::vector<double> sample) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double hi = (static_cast<double>(i) + 1.0) / n - sample[i];
    const double lo = sample[i] - static_cast<double>(i) / n;
    d = std::max({d, hi, lo});
  }
  return d;
}

}  // namespace testutil
