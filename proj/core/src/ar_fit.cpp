#include "tarlm/ar_fit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace tarlm {

namespace {

constexpr double kConditionLimit = 1e12;

std::size_t min_length_for(std::size_t p) {
  return p + std::max(p + 2, std::size_t{10});
}

// Rows t = start_row .. n-1 of the lagged design: [1, X_{t-1}, .., X_{t-p}].
void fill_design(const std::vector<double>& v, std::size_t p,
                 std::size_t start_row, Eigen::MatrixXd& design,
                 Eigen::VectorXd& response) {
  const std::size_t rows = v.size() - start_row;
  design.resize(static_cast<Eigen::Index>(rows),
                static_cast<Eigen::Index>(p + 1));
  response.resize(static_cast<Eigen::Index>(rows));
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t t = start_row + i;
    design(static_cast<Eigen::Index>(i), 0) = 1.0;
    for (std::size_t lag = 1; lag <= p; ++lag) {
      design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(lag)) =
          v[t - lag];
    }
    response(static_cast<Eigen::Index>(i)) = v[t];
  }
}

void check_cross_product_condition(const Eigen::MatrixXd& design) {
  const Eigen::MatrixXd xtx = design.transpose() * design;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(xtx);
  const auto& ev = eig.eigenvalues();
  const double largest = ev(ev.size() - 1);
  const double smallest = ev(0);
  if (!(smallest > 0.0) || largest / smallest > kConditionLimit) {
    throw SingularDesign(
        "fit_ar: cross-product matrix condition number exceeds 1e12");
  }
}

}  // namespace

double ARFit::rss() const {
  double acc = 0.0;
  for (double e : residuals) {
    acc += e * e;
  }
  return acc;
}

ARFit fit_ar(const TimeSeries& series, std::size_t p) {
  return fit_ar_from(series, p, p);
}

ARFit fit_ar_from(const TimeSeries& series, std::size_t p,
                  std::size_t start_row) {
  if (start_row < p) {
    throw std::invalid_argument("fit_ar_from: start_row must be >= p");
  }
  const std::size_t n = series.size();
  const std::size_t extra = start_row - p;
  if (n < extra + min_length_for(p)) {
    throw InsufficientData("fit_ar: series length " + std::to_string(n) +
                           " too short for AR(" + std::to_string(p) + ")");
  }

  Eigen::MatrixXd design;
  Eigen::VectorXd response;
  fill_design(series.values, p, start_row, design, response);
  check_cross_product_condition(design);

  // QR on the design for conditioning; the tests cross-check against a
  // plain normal-equations solve.
  Eigen::VectorXd beta = design.householderQr().solve(response);
  Eigen::VectorXd resid = response - design * beta;

  ARFit fit;
  fit.order = p;
  fit.coeffs.assign(beta.data(), beta.data() + beta.size());
  fit.residuals.assign(resid.data(), resid.data() + resid.size());
  fit.n_eff = static_cast<std::size_t>(resid.size());
  fit.sigma2 = resid.squaredNorm() /
               static_cast<double>(fit.n_eff - p - 1);
  fit.start_row = start_row;
  fit.initial_values.assign(series.values.begin() +
                                static_cast<std::ptrdiff_t>(start_row - p),
                            series.values.begin() +
                                static_cast<std::ptrdiff_t>(start_row));
  fit.conditioning_prefix.assign(
      series.values.begin(),
      series.values.begin() + static_cast<std::ptrdiff_t>(start_row));
  return fit;
}

std::size_t select_order_aic(const TimeSeries& series, std::size_t p_max) {
  if (p_max < 1) {
    throw std::invalid_argument("select_order_aic: p_max must be >= 1");
  }
  const std::size_t n = series.size();
  if (n < min_length_for(p_max)) {
    throw InsufficientData("select_order_aic: series length " +
                           std::to_string(n) + " too short for p_max " +
                           std::to_string(p_max));
  }

  const std::size_t common_start = p_max;
  const double n_c = static_cast<double>(n - common_start);

  std::size_t best_p = 1;
  double best_aic = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd design;
  Eigen::VectorXd response;
  for (std::size_t p = 1; p <= p_max; ++p) {
    fill_design(series.values, p, common_start, design, response);
    check_cross_product_condition(design);
    Eigen::VectorXd beta = design.householderQr().solve(response);
    const double rss = (response - design * beta).squaredNorm();
    const double aic =
        n_c * std::log(rss / n_c) + 2.0 * static_cast<double>(p + 1);
    if (aic < best_aic) {
      best_aic = aic;
      best_p = p;
    }
  }
  return best_p;
}

}  // namespace tarlm
