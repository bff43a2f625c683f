#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "tarlm/rng.hpp"
#include "tarlm/simulate.hpp"
#include "test_util.hpp"

using namespace tarlm;
using testutil::lag1_autocorrelation;
using testutil::mean_of;
using testutil::variance_of;

TEST_CASE("white-noise simulation has standard-normal moments") {
  ARParams wn;  // p = 0, sd 1
  const TimeSeries s = simulate_ar(wn, 100000, 0, RngSeed{42, 0});
  REQUIRE(s.size() == 100000);
  CHECK(std::fabs(mean_of(s.values)) < 0.02);
  CHECK(std::fabs(variance_of(s.values) - 1.0) < 0.03);
}

TEST_CASE("n=3 white noise returns exactly three values") {
  ARParams wn;
  const TimeSeries s = simulate_ar(wn, 3, 0, RngSeed{7, 3});
  CHECK(s.size() == 3);
}

TEST_CASE("AR(1) phi=0.9 matches its theoretical lag-1 autocorrelation") {
  ARParams ar{0.0, {0.9}, 1.0};
  const TimeSeries s = simulate_ar(ar, 100000, 500, RngSeed{11, 1});
  CHECK(lag1_autocorrelation(s.values) == doctest::Approx(0.9).epsilon(0.025));
}

TEST_CASE("same seed twice gives identical sequences") {
  ARParams ar{0.5, {0.3, -0.2}, 2.0};
  const TimeSeries a = simulate_ar(ar, 500, 100, RngSeed{123, 9});
  const TimeSeries b = simulate_ar(ar, 500, 100, RngSeed{123, 9});
  CHECK(a.values == b.values);
}

TEST_CASE("distinct streams give distinct sequences") {
  ARParams wn;
  const TimeSeries a = simulate_ar(wn, 64, 0, RngSeed{5, 1});
  const TimeSeries b = simulate_ar(wn, 64, 0, RngSeed{5, 2});
  CHECK(a.values != b.values);
}

TEST_CASE("TAR with zero deltas reduces to AR bit-for-bit") {
  ARParams base{0.4, {0.5, -0.3}, 1.5};
  TARParams tar;
  tar.base = base;
  tar.delta_intercept = 0.0;
  tar.delta_coeffs = {0.0, 0.0};
  tar.threshold = 0.7;
  tar.delay = 2;
  const TimeSeries ar = simulate_ar(base, 400, 250, RngSeed{77, 4});
  const TimeSeries null_tar = simulate_tar(tar, 400, 250, RngSeed{77, 4});
  CHECK(ar.values == null_tar.values);
}

TEST_CASE("regime-split regressions recover both regimes of the M1 design") {
  TARParams tar;
  tar.base = ARParams{-0.1, {-0.8}, 1.0};
  tar.delta_intercept = 0.9;
  tar.delta_coeffs = {0.9};
  tar.threshold = 0.0;
  tar.delay = 1;
  const TimeSeries s = simulate_tar(tar, 100000, 500, RngSeed{2024, 6});

  // Lower regime: intercept -0.1 + 0.9, slope -0.8 + 0.9.
  double lower_frac = 0.0;
  for (std::size_t t = 1; t < s.size(); ++t) {
    lower_frac += s.values[t - 1] <= 0.0 ? 1.0 : 0.0;
  }
  lower_frac /= static_cast<double>(s.size() - 1);
  CHECK(lower_frac > 0.05);
  CHECK(lower_frac < 0.95);

  for (const bool lower : {true, false}) {
    std::size_t rows = 0;
    for (std::size_t t = 1; t < s.size(); ++t) {
      if ((s.values[t - 1] <= 0.0) == lower) ++rows;
    }
    std::vector<double> ys, xs;
    ys.reserve(rows);
    xs.reserve(rows);
    for (std::size_t t = 1; t < s.size(); ++t) {
      if ((s.values[t - 1] <= 0.0) == lower) {
        ys.push_back(s.values[t]);
        xs.push_back(s.values[t - 1]);
      }
    }
    const auto beta = testutil::ols_normal_equations(
        rows, 2,
        [&](std::size_t i, std::vector<long double>& x) {
          x[0] = 1.0L;
          x[1] = xs[i];
        },
        [&](std::size_t i) -> long double { return ys[i]; });
    const double want_intercept = lower ? 0.8 : -0.1;
    const double want_slope = lower ? 0.1 : -0.8;
    CHECK(std::fabs(static_cast<double>(beta[0]) - want_intercept) < 0.05);
    CHECK(std::fabs(static_cast<double>(beta[1]) - want_slope) < 0.05);
  }
}

TEST_CASE("threshold at +infinity merges the two regimes") {
  TARParams tar;
  tar.base = ARParams{0.3, {0.4}, 1.0};
  tar.delta_intercept = -0.2;
  tar.delta_coeffs = {0.25};
  tar.threshold = std::numeric_limits<double>::infinity();
  tar.delay = 1;
  ARParams merged{0.3 + -0.2, {0.4 + 0.25}, 1.0};
  const TimeSeries a = simulate_tar(tar, 2000, 300, RngSeed{9, 9});
  const TimeSeries b = simulate_ar(merged, 2000, 300, RngSeed{9, 9});
  for (std::size_t t = 0; t < a.size(); ++t) {
    CHECK(a.values[t] == doctest::Approx(b.values[t]).epsilon(1e-10));
  }
}

TEST_CASE("long-run variance of stationary AR(1) matches theory") {
  for (const double phi : {-0.6, 0.3, 0.6}) {
    ARParams ar{0.0, {phi}, 1.0};
    const std::size_t n = 200000;
    const TimeSeries s =
        simulate_ar(ar, n, 500, RngSeed{31, static_cast<std::uint64_t>(
                                                phi * 10 + 100)});
    const double want = 1.0 / (1.0 - phi * phi);
    // Bartlett-style standard error of the sample autocovariance at lag 0.
    const double se = want * std::sqrt(2.0 * (1.0 + phi * phi) /
                                       (static_cast<double>(n) *
                                        (1.0 - phi * phi)));
    CHECK(std::fabs(variance_of(s.values) - want) < 3.0 * se);
  }
}

TEST_CASE("derive_stream separates children deterministically") {
  const RngSeed base{99, 7};
  const RngSeed a = derive_stream(base, 1);
  const RngSeed b = derive_stream(base, 2);
  CHECK(a.seed == base.seed);
  CHECK(a.stream_id != b.stream_id);
  CHECK(derive_stream(base, 1) == a);
}

TEST_CASE("uniform_below covers the range without bias artifacts") {
  Rng rng(RngSeed{1, 1});
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t x = rng.uniform_below(7);
    REQUIRE(x < 7);
    seen.insert(x);
  }
  CHECK(seen.size() == 7);
}
