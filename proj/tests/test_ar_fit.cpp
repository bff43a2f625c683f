#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "tarlm/ar_fit.hpp"
#include "tarlm/simulate.hpp"
#include "test_util.hpp"

using namespace tarlm;

namespace {

const std::vector<double> kFixture12 = {2.1, 1.7, 3.4, 2.9, 4.2, 3.6,
                                        2.2, 5.1, 4.4, 3.9, 2.8, 3.3};

// Exact rational solution of the 2x2 normal equations for kFixture12, p=1.
constexpr double kFixtureB0 = 2.9260221260221262;
constexpr double kFixtureB1 = 0.14638447971781304;
constexpr double kFixtureSigma2 = 1.0584547414177043;

}  // namespace

TEST_CASE("12-point fixture matches the exact normal-equations solution") {
  const TimeSeries series(kFixture12);
  const ARFit fit = fit_ar(series, 1);
  REQUIRE(fit.coeffs.size() == 2);
  CHECK(std::fabs(fit.coeffs[0] - kFixtureB0) < 1e-10 * std::fabs(kFixtureB0));
  CHECK(std::fabs(fit.coeffs[1] - kFixtureB1) < 1e-10 * std::fabs(kFixtureB1));
  CHECK(std::fabs(fit.sigma2 - kFixtureSigma2) <
        1e-10 * std::fabs(kFixtureSigma2));

  // Same answer through the in-test long double route.
  const auto beta = testutil::ols_normal_equations(
      11, 2,
      [&](std::size_t i, std::vector<long double>& x) {
        x[0] = 1.0L;
        x[1] = kFixture12[i];
      },
      [&](std::size_t i) -> long double { return kFixture12[i + 1]; });
  CHECK(std::fabs(fit.coeffs[0] - static_cast<double>(beta[0])) < 1e-10);
  CHECK(std::fabs(fit.coeffs[1] - static_cast<double>(beta[1])) < 1e-10);

  CHECK(fit.n_eff == series.size() - 1);
  CHECK(fit.sigma2 ==
        doctest::Approx(fit.rss() / static_cast<double>(fit.n_eff - 2))
            .epsilon(1e-15));
  CHECK(fit.initial_values == std::vector<double>{2.1});
}

TEST_CASE("constant series is a singular design") {
  const TimeSeries series(std::vector<double>(30, 4.2));
  CHECK_THROWS_AS(fit_ar(series, 1), SingularDesign);
}

TEST_CASE("too-short series raises InsufficientData") {
  const TimeSeries series(std::vector<double>{1, 2, 3, 4, 5});
  CHECK_THROWS_AS(fit_ar(series, 1), InsufficientData);
}

TEST_CASE("estimates are consistent on a long AR(1) path") {
  ARParams ar{1.0, {0.5}, 1.0};
  const TimeSeries s = simulate_ar(ar, 100000, 500, RngSeed{314, 0});
  const ARFit fit = fit_ar(s, 1);
  CHECK(std::fabs(fit.coeffs[1] - 0.5) < 0.01);
}

TEST_CASE("residual orthogonality holds on random series") {
  for (std::uint64_t stream = 0; stream < 20; ++stream) {
    ARParams ar{0.2, {0.4, -0.3}, 1.3};
    const TimeSeries s = simulate_ar(ar, 150, 200, RngSeed{555, stream});
    const std::size_t p = 1 + stream % 3;
    const ARFit fit = fit_ar(s, p);

    double scale = 0.0;
    for (double x : s.values) scale = std::max(scale, std::fabs(x));
    const double tol = 1e-8 * static_cast<double>(fit.n_eff) * scale * scale;

    double sum_e = 0.0;
    for (double e : fit.residuals) sum_e += e;
    CHECK(std::fabs(sum_e) < tol);
    for (std::size_t lag = 1; lag <= p; ++lag) {
      double dot = 0.0;
      for (std::size_t i = 0; i < fit.n_eff; ++i) {
        dot += fit.residuals[i] * s.values[fit.start_row + i - lag];
      }
      CHECK(std::fabs(dot) < tol);
    }
  }
}

TEST_CASE("fit is affine-equivariant") {
  ARParams ar{0.0, {0.6}, 1.0};
  const TimeSeries s = simulate_ar(ar, 200, 100, RngSeed{88, 1});
  const ARFit base = fit_ar(s, 1);

  const double a = 3.25, b = -7.5;
  std::vector<double> scaled(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    scaled[i] = a * s.values[i] + b;
  }
  const ARFit other = fit_ar(TimeSeries(scaled), 1);
  for (std::size_t i = 0; i < base.n_eff; ++i) {
    CHECK(std::fabs(other.residuals[i] - a * base.residuals[i]) <
          1e-10 * (1.0 + std::fabs(a * base.residuals[i])));
  }
  CHECK(std::fabs(other.sigma2 - a * a * base.sigma2) <
        1e-10 * a * a * base.sigma2);
}

TEST_CASE("near-noiseless simulation is reproduced to 1e-4") {
  // No burn-in: the decaying transient from the zero initial states is what
  // keeps the design well conditioned once the noise is this small.
  ARParams ar{0.7, {0.45, -0.2}, 1e-8};
  const TimeSeries s = simulate_ar(ar, 100, 0, RngSeed{606, 2});
  const ARFit fit = fit_ar(s, 2);
  CHECK(std::fabs(fit.coeffs[0] - 0.7) < 1e-4);
  CHECK(std::fabs(fit.coeffs[1] - 0.45) < 1e-4);
  CHECK(std::fabs(fit.coeffs[2] + 0.2) < 1e-4);
}

TEST_CASE("AIC prefers order 1 for white noise") {
  ARParams wn;
  std::size_t picked_one = 0;
  const std::size_t reps = 200;
  for (std::uint64_t r = 0; r < reps; ++r) {
    const TimeSeries s = simulate_ar(wn, 200, 100, RngSeed{70, r});
    if (select_order_aic(s, 5) == 1) {
      ++picked_one;
    }
  }
  CHECK(picked_one > reps / 2);
}

TEST_CASE("AIC mode is 2 for an AR(2) design") {
  ARParams ar{0.0, {-0.35, -0.45}, 1.0};
  std::map<std::size_t, std::size_t> histogram;
  for (std::uint64_t r = 0; r < 200; ++r) {
    const TimeSeries s = simulate_ar(ar, 200, 500, RngSeed{71, r});
    ++histogram[select_order_aic(s, 5)];
  }
  std::size_t mode = 0, best = 0;
  for (const auto& [order, count] : histogram) {
    if (count > best) {
      best = count;
      mode = order;
    }
  }
  CHECK(mode == 2);
}

TEST_CASE("single-candidate order selection returns 1") {
  ARParams wn;
  const TimeSeries s = simulate_ar(wn, 60, 0, RngSeed{72, 0});
  CHECK(select_order_aic(s, 1) == 1);
}
