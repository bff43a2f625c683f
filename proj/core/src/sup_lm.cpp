#include "tarlm/sup_lm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tarlm {

namespace {

constexpr double kConditionLimit = 1e12;
constexpr double kNegativityClamp = -1e-10;

std::size_t first_row(std::size_t p, int d) {
  return std::max(p, static_cast<std::size_t>(d));
}

// Row-major lagged regressors (1, X_{t-1}, .., X_{t-p}) for t = start .. n-1,
// plus the threshold variable X_{t-d} per row.
struct RegressionRows {
  std::size_t m = 0;       // number of rows
  std::size_t k = 0;       // p + 1
  std::vector<double> x;   // m * k
  std::vector<double> z;   // threshold variable per row
  std::vector<std::size_t> order;  // row indices sorted by z ascending
};

RegressionRows make_rows(const TimeSeries& series, const ARFit& fit, int d) {
  const auto& v = series.values;
  const std::size_t p = fit.order;
  const std::size_t start = fit.start_row;
  if (start < static_cast<std::size_t>(d)) {
    throw std::invalid_argument(
        "sup_lm: fit start_row is smaller than the delay");
  }
  RegressionRows rows;
  rows.m = v.size() - start;
  rows.k = p + 1;
  if (rows.m != fit.n_eff) {
    throw std::invalid_argument("sup_lm: fit does not match the series");
  }
  rows.x.resize(rows.m * rows.k);
  rows.z.resize(rows.m);
  for (std::size_t i = 0; i < rows.m; ++i) {
    const std::size_t t = start + i;
    double* xr = rows.x.data() + i * rows.k;
    xr[0] = 1.0;
    for (std::size_t lag = 1; lag <= p; ++lag) {
      xr[lag] = v[t - lag];
    }
    rows.z[i] = v[t - static_cast<std::size_t>(d)];
  }
  rows.order.resize(rows.m);
  std::iota(rows.order.begin(), rows.order.end(), std::size_t{0});
  std::sort(rows.order.begin(), rows.order.end(),
            [&rows](std::size_t a, std::size_t b) {
              if (rows.z[a] != rows.z[b]) return rows.z[a] < rows.z[b];
              return a < b;
            });
  return rows;
}

// One sorted pass: snapshots of the gated cross-product sums and gated score
// sums at every candidate, then the ungated totals. Scaling by 1/sigma2 is
// applied at snapshot time so the full-indicator snapshot is bit-identical
// to i11.
struct ProfileData {
  InfoBlocks blocks;
  Eigen::MatrixXd scores;  // (p+1) x n_candidates
};

ProfileData accumulate_profile(const RegressionRows& rows, const ARFit& fit,
                               const ThresholdGrid& grid) {
  const std::size_t k = rows.k;
  const std::size_t n_cand = grid.candidates.size();
  const double inv_sigma2 = 1.0 / fit.sigma2;

  std::vector<double> moment(k * k, 0.0);  // running sum of x x'
  std::vector<double> score(k, 0.0);       // running sum of res * x

  ProfileData out;
  out.blocks.candidates = grid.candidates;
  out.blocks.n_rows = rows.m;
  out.blocks.i22.reserve(n_cand);
  out.scores.resize(static_cast<Eigen::Index>(k),
                    static_cast<Eigen::Index>(n_cand));

  auto add_row = [&](std::size_t i) {
    const double* xr = rows.x.data() + i * k;
    const double e = fit.residuals[i];
    for (std::size_t a = 0; a < k; ++a) {
      const double xa = xr[a];
      score[a] += e * xa;
      double* mrow = moment.data() + a * k;
      for (std::size_t b = a; b < k; ++b) {
        mrow[b] += xa * xr[b];
      }
    }
  };
  auto snapshot = [&](Eigen::MatrixXd& dst) {
    dst.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a; b < k; ++b) {
        const double val = moment[a * k + b] * inv_sigma2;
        dst(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = val;
        dst(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = val;
      }
    }
  };

  std::size_t pos = 0;
  for (std::size_t g = 0; g < n_cand; ++g) {
    const double r = grid.candidates[g];
    while (pos < rows.m && rows.z[rows.order[pos]] <= r) {
      add_row(rows.order[pos]);
      ++pos;
    }
    Eigen::MatrixXd snap;
    snapshot(snap);
    out.blocks.i22.push_back(std::move(snap));
    for (std::size_t a = 0; a < k; ++a) {
      out.scores(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(g)) =
          score[a] * inv_sigma2;
    }
  }
  while (pos < rows.m) {
    add_row(rows.order[pos]);
    ++pos;
  }
  snapshot(out.blocks.i11);
  return out;
}

SupLMResult evaluate_profile(const TimeSeries& series, ARFit fit,
                             const ThresholdGrid& grid) {
  const RegressionRows rows = make_rows(series, fit, grid.delay);
  ProfileData data = accumulate_profile(rows, fit, grid);

  SupLMResult result;
  result.fit = std::move(fit);
  result.grid = grid;
  result.profile.reserve(grid.candidates.size());

  bool have_max = false;
  for (std::size_t g = 0; g < grid.candidates.size(); ++g) {
    const double r = grid.candidates[g];
    const Eigen::VectorXd s = data.scores.col(static_cast<Eigen::Index>(g));
    try {
      const double value = lm_at_threshold(s, data.blocks, r);
      result.profile.emplace_back(r, value);
      if (!have_max || value > result.statistic) {
        result.statistic = value;
        result.argmax_threshold = r;
        have_max = true;
      }
    } catch (const SingularAtThreshold& err) {
      result.skipped.push_back({r, err.what()});
    }
  }
  if (!have_max) {
    throw AllThresholdsSingular(
        "suplm_statistic: every grid candidate was skipped");
  }
  return result;
}

}  // namespace

double quantile_type7(std::vector<double> values, double q) {
  if (values.empty()) {
    throw std::invalid_argument("quantile_type7: empty sample");
  }
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("quantile_type7: q outside [0, 1]");
  }
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= values.size()) {
    return values.back();
  }
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

ThresholdGrid build_grid(const TimeSeries& series, std::size_t p, int d,
                         double lower_q, double upper_q) {
  if (d < 1 || static_cast<std::size_t>(d) > series.size() - 1) {
    throw std::invalid_argument("build_grid: delay out of range");
  }
  if (!(lower_q > 0.0 && lower_q < upper_q && upper_q < 1.0)) {
    throw std::invalid_argument("build_grid: need 0 < lower_q < upper_q < 1");
  }
  const double lo = quantile_type7(series.values, lower_q);
  const double hi = quantile_type7(series.values, upper_q);

  const std::size_t start = first_row(p, d);
  if (start >= series.size()) {
    throw std::invalid_argument("build_grid: no regression rows");
  }
  std::vector<double> cand;
  cand.reserve(series.size() - start);
  for (std::size_t t = start; t < series.size(); ++t) {
    const double z = series.values[t - static_cast<std::size_t>(d)];
    if (z >= lo && z <= hi) {
      cand.push_back(z);
    }
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  if (cand.size() < 2) {
    throw DegenerateGrid(
        "build_grid: fewer than two distinct candidates between quantiles");
  }
  ThresholdGrid grid;
  grid.delay = d;
  grid.candidates = std::move(cand);
  grid.lower_q = lower_q;
  grid.upper_q = upper_q;
  return grid;
}

InfoBlocks information_blocks(const TimeSeries& series, const ARFit& fit,
                              const ThresholdGrid& grid) {
  const RegressionRows rows = make_rows(series, fit, grid.delay);
  return accumulate_profile(rows, fit, grid).blocks;
}

Eigen::VectorXd score_psi(const TimeSeries& series, const ARFit& fit,
                          double r, int d) {
  const RegressionRows rows = make_rows(series, fit, d);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows.k));
  for (std::size_t i = 0; i < rows.m; ++i) {
    if (rows.z[i] <= r) {
      const double e = fit.residuals[i];
      const double* xr = rows.x.data() + i * rows.k;
      for (std::size_t a = 0; a < rows.k; ++a) {
        s(static_cast<Eigen::Index>(a)) += e * xr[a];
      }
    }
  }
  return s / fit.sigma2;
}

Eigen::MatrixXd schur_complement(const InfoBlocks& blocks, std::size_t index) {
  if (index >= blocks.i22.size()) {
    throw std::invalid_argument("schur_complement: index out of range");
  }
  const Eigen::MatrixXd& gated = blocks.i22[index];
  const Eigen::MatrixXd w = blocks.i11.ldlt().solve(gated);
  Eigen::MatrixXd s = gated - gated * w;
  s = 0.5 * (s + s.transpose()).eval();
  return s;
}

double lm_at_threshold(const Eigen::VectorXd& score, const InfoBlocks& blocks,
                       double r) {
  const auto it = std::lower_bound(blocks.candidates.begin(),
                                   blocks.candidates.end(), r);
  if (it == blocks.candidates.end() || *it != r) {
    throw std::invalid_argument(
        "lm_at_threshold: r is not a grid candidate of these blocks");
  }
  const std::size_t index =
      static_cast<std::size_t>(it - blocks.candidates.begin());

  const Eigen::MatrixXd s = schur_complement(blocks, index);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  const double smallest = eig.eigenvalues()(0);
  const double largest = eig.eigenvalues()(eig.eigenvalues().size() - 1);
  if (!(smallest > 0.0) || largest / smallest > kConditionLimit) {
    throw SingularAtThreshold(
        "lm_at_threshold: Schur complement condition number exceeds 1e12");
  }
  const double value = score.dot(s.llt().solve(score));
  if (value < kNegativityClamp) {
    throw SingularAtThreshold(
        "lm_at_threshold: quadratic form collapsed below the roundoff clamp");
  }
  return std::max(value, 0.0);
}

SupLMResult suplm_statistic(const TimeSeries& series, std::size_t p, int d,
                            double lower_q, double upper_q) {
  ARFit fit = fit_ar_from(series, p, first_row(p, d));
  ThresholdGrid grid = build_grid(series, p, d, lower_q, upper_q);
  return evaluate_profile(series, std::move(fit), grid);
}

SupLMResult suplm_statistic_with_grid(const TimeSeries& series, std::size_t p,
                                      const ThresholdGrid& grid) {
  if (grid.candidates.empty()) {
    throw std::invalid_argument("suplm_statistic_with_grid: empty grid");
  }
  ARFit fit = fit_ar_from(series, p, first_row(p, grid.delay));
  return evaluate_profile(series, std::move(fit), grid);
}

}  // namespace tarlm
