#include "tarlm/asymptotic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tarlm/parallel.hpp"

namespace tarlm {

namespace {

constexpr double kConditionLimit = 1e12;
constexpr double kPsdFailTol = 1e-8;    // relative eigenvalue floor -> error
constexpr double kClipTol = 1e-10;      // relative clip-to-zero band

std::vector<double> dedup_and_thin(const std::vector<double>& candidates,
                                   std::size_t max_grid) {
  std::vector<double> grid = candidates;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (max_grid >= 2 && grid.size() > max_grid) {
    std::vector<double> thinned;
    thinned.reserve(max_grid);
    const double step = static_cast<double>(grid.size() - 1) /
                        static_cast<double>(max_grid - 1);
    for (std::size_t i = 0; i < max_grid; ++i) {
      const auto idx = static_cast<std::size_t>(
          std::llround(static_cast<double>(i) * step));
      thinned.push_back(grid[std::min(idx, grid.size() - 1)]);
    }
    thinned.erase(std::unique(thinned.begin(), thinned.end()), thinned.end());
    grid = std::move(thinned);
  }
  return grid;
}

}  // namespace

double LimitSimResult::p_value(double statistic) const {
  const auto lb =
      std::lower_bound(sup_draws.begin(), sup_draws.end(), statistic);
  return static_cast<double>(sup_draws.end() - lb) /
         static_cast<double>(sup_draws.size());
}

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) * 0.3989422804014326779399461;
}

// Autocovariances gamma(0..max_lag) of a stationary AR(p) via the
// Yule-Walker system, then the tail recursion.
std::vector<double> autocovariances(const std::vector<double>& phi,
                                    double sigma2, std::size_t max_lag) {
  const std::size_t p = phi.size();
  std::vector<double> gamma(max_lag + 1, 0.0);
  if (p == 0) {
    gamma[0] = sigma2;
    return gamma;
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p + 1),
                                            static_cast<Eigen::Index>(p + 1));
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p + 1));
  for (std::size_t k = 0; k <= p; ++k) {
    a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) += 1.0;
    for (std::size_t i = 1; i <= p; ++i) {
      const std::size_t lag = k >= i ? k - i : i - k;
      a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(lag)) -=
          phi[i - 1];
    }
  }
  b(0) = sigma2;
  const Eigen::VectorXd head = a.fullPivLu().solve(b);
  for (std::size_t k = 0; k <= std::min(p, max_lag); ++k) {
    gamma[k] = head(static_cast<Eigen::Index>(k));
  }
  for (std::size_t k = p + 1; k <= max_lag; ++k) {
    double acc = 0.0;
    for (std::size_t i = 1; i <= p; ++i) {
      acc += phi[i - 1] * gamma[k - i];
    }
    gamma[k] = acc;
  }
  return gamma;
}

double companion_spectral_radius(const std::vector<double>& phi) {
  const std::size_t p = phi.size();
  if (p == 0) {
    return 0.0;
  }
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p),
                                            static_cast<Eigen::Index>(p));
  for (std::size_t j = 0; j < p; ++j) {
    c(0, static_cast<Eigen::Index>(j)) = phi[j];
  }
  for (std::size_t j = 1; j < p; ++j) {
    c(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j - 1)) = 1.0;
  }
  return c.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

InfoBlocks limit_information_blocks(const ARFit& fit,
                                    const ThresholdGrid& grid) {
  const std::size_t p = fit.order;
  const std::size_t k = p + 1;
  const std::size_t d = static_cast<std::size_t>(grid.delay);

  std::vector<double> phi(fit.coeffs.begin() + 1, fit.coeffs.end());
  const double rho = companion_spectral_radius(phi);
  if (rho >= 0.999) {
    // Pull an explosive or unit-root fit back inside the stationarity
    // region: scaling phi_i by c^i scales every companion eigenvalue by c.
    const double c = 0.999 / rho;
    double factor = c;
    for (double& coef : phi) {
      coef *= factor;
      factor *= c;
    }
  }
  double phi_sum = 0.0;
  for (double coef : phi) {
    phi_sum += coef;
  }
  const double mean = fit.coeffs[0] / (1.0 - phi_sum);

  const std::size_t max_lag = std::max(p, d);
  const std::vector<double> gamma =
      autocovariances(phi, fit.sigma2, max_lag);
  if (!(gamma[0] > 0.0)) {
    throw KernelNotPSD(
        "limit_information_blocks: nonpositive stationary variance");
  }
  const double sd = std::sqrt(gamma[0]);

  // cov(X_{t-i}, X_{t-d}) for the lag coordinates i = 1..p.
  std::vector<double> cov_with_w(k, 0.0);
  for (std::size_t i = 1; i <= p; ++i) {
    cov_with_w[i] = gamma[d >= i ? d - i : i - d];
  }

  InfoBlocks blocks;
  blocks.candidates = grid.candidates;
  blocks.n_rows = 1;  // entries are already expectations, no 1/n rescale
  const double inv_sigma2 = 1.0 / fit.sigma2;

  Eigen::MatrixXd full(static_cast<Eigen::Index>(k),
                       static_cast<Eigen::Index>(k));
  full(0, 0) = 1.0;
  for (std::size_t j = 1; j <= p; ++j) {
    full(0, static_cast<Eigen::Index>(j)) = mean;
    full(static_cast<Eigen::Index>(j), 0) = mean;
    for (std::size_t i = j; i <= p; ++i) {
      const double value = gamma[i - j] + mean * mean;
      full(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
      full(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = value;
    }
  }
  blocks.i11 = full * inv_sigma2;

  blocks.i22.reserve(grid.candidates.size());
  for (const double r : grid.candidates) {
    const double w = (r - mean) / sd;
    const double cdf = normal_cdf(w);
    const double pdf = normal_pdf(w);
    Eigen::MatrixXd gated(static_cast<Eigen::Index>(k),
                          static_cast<Eigen::Index>(k));
    gated(0, 0) = cdf;
    for (std::size_t j = 1; j <= p; ++j) {
      const double first = mean * cdf - (cov_with_w[j] / sd) * pdf;
      gated(0, static_cast<Eigen::Index>(j)) = first;
      gated(static_cast<Eigen::Index>(j), 0) = first;
    }
    for (std::size_t i = 1; i <= p; ++i) {
      const double beta_i = cov_with_w[i] / gamma[0];
      for (std::size_t j = i; j <= p; ++j) {
        const double beta_j = cov_with_w[j] / gamma[0];
        const double value = (gamma[j - i] + mean * mean) * cdf -
                             mean * (beta_i + beta_j) * sd * pdf -
                             beta_i * beta_j * gamma[0] * w * pdf;
        gated(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            value;
        gated(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
            value;
      }
    }
    blocks.i22.push_back(gated * inv_sigma2);
  }
  return blocks;
}

LimitSimResult simulate_limit_process(const TimeSeries& series,
                                      const ARFit& fit,
                                      const ThresholdGrid& grid,
                                      const LimitSimConfig& cfg,
                                      unsigned threads) {
  if (cfg.n_sim < 100) {
    throw std::invalid_argument(
        "simulate_limit_process: n_sim must be >= 100 for quantile reports");
  }
  if (cfg.levels.empty()) {
    throw std::invalid_argument("simulate_limit_process: no levels given");
  }
  for (double level : cfg.levels) {
    if (!(level > 0.0 && level < 1.0)) {
      throw std::invalid_argument(
          "simulate_limit_process: levels must lie in (0, 1)");
    }
  }
  if (grid.candidates.size() < 1) {
    throw std::invalid_argument("simulate_limit_process: empty grid");
  }

  ThresholdGrid used = grid;
  used.candidates = dedup_and_thin(grid.candidates, cfg.max_grid);

  InfoBlocks blocks;
  switch (cfg.kernel) {
    case KernelSource::kSampleMoments:
      blocks = information_blocks(series, fit, used);
      break;
    case KernelSource::kFittedModel:
      blocks = limit_information_blocks(fit, used);
      break;
    case KernelSource::kPivotal: {
      // Map candidates to information fractions u and feed the proportional
      // kernel u*I through the same assembly: the Schur complement of
      // (i11 = I, i22 = u*I) is the bridge kernel (u1 ^ u2 - u1*u2) * I.
      const std::size_t d = static_cast<std::size_t>(used.delay);
      std::vector<double> z;
      z.reserve(fit.n_eff);
      for (std::size_t t = fit.start_row; t < series.size(); ++t) {
        z.push_back(series.values[t - d]);
      }
      std::sort(z.begin(), z.end());
      const std::size_t k = fit.order + 1;
      blocks.candidates = used.candidates;
      blocks.n_rows = 1;
      blocks.i11 = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k),
                                             static_cast<Eigen::Index>(k));
      std::vector<double> kept;
      for (const double r : used.candidates) {
        const double u =
            static_cast<double>(std::upper_bound(z.begin(), z.end(), r) -
                                z.begin()) /
            static_cast<double>(z.size());
        if (u <= 0.0 || u >= 1.0) {
          continue;  // no bridge normalization at the extremes
        }
        kept.push_back(r);
        blocks.i22.push_back(u * blocks.i11);
      }
      if (kept.empty()) {
        throw AllThresholdsSingular(
            "simulate_limit_process: every candidate maps to a degenerate "
            "information fraction");
      }
      blocks.candidates = kept;
      used.candidates = std::move(kept);
      break;
    }
  }
  const std::size_t n_grid = used.candidates.size();
  const std::size_t k = static_cast<std::size_t>(blocks.i11.rows());
  const std::size_t dim = n_grid * k;
  const double inv_n = 1.0 / static_cast<double>(blocks.n_rows);

  // Joint covariance of (xi(r))_r. Diagonal blocks go through the same
  // schur_complement as the statistic; off-diagonals follow the kernel with
  // r1 < r2, where J22(r1 ^ r2) = J22(r1).
  Eigen::LDLT<Eigen::MatrixXd> i11_solver(blocks.i11);
  std::vector<Eigen::MatrixXd> w(n_grid);  // J11^{-1} J22(r)
  for (std::size_t g = 0; g < n_grid; ++g) {
    w[g] = i11_solver.solve(blocks.i22[g]);
  }

  Eigen::MatrixXd kernel(static_cast<Eigen::Index>(dim),
                         static_cast<Eigen::Index>(dim));
  std::vector<Eigen::MatrixXd> diag(n_grid);
  for (std::size_t a = 0; a < n_grid; ++a) {
    diag[a] = schur_complement(blocks, a) * inv_n;
    kernel.block(static_cast<Eigen::Index>(a * k),
                 static_cast<Eigen::Index>(a * k),
                 static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) =
        diag[a];
    for (std::size_t b = a + 1; b < n_grid; ++b) {
      const Eigen::MatrixXd off =
          (blocks.i22[a] - blocks.i22[a] * w[b]) * inv_n;
      kernel.block(static_cast<Eigen::Index>(a * k),
                   static_cast<Eigen::Index>(b * k),
                   static_cast<Eigen::Index>(k),
                   static_cast<Eigen::Index>(k)) = off;
      kernel.block(static_cast<Eigen::Index>(b * k),
                   static_cast<Eigen::Index>(a * k),
                   static_cast<Eigen::Index>(k),
                   static_cast<Eigen::Index>(k)) = off.transpose();
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(kernel);
  if (eig.info() != Eigen::Success) {
    throw KernelNotPSD("simulate_limit_process: eigendecomposition failed");
  }
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double largest = lambda(lambda.size() - 1);
  if (!(largest > 0.0)) {
    throw KernelNotPSD("simulate_limit_process: kernel has no positive mass");
  }
  if (lambda(0) < -kPsdFailTol * largest) {
    throw KernelNotPSD(
        "simulate_limit_process: kernel eigenvalue below the ridge-repair "
        "tolerance");
  }
  Eigen::VectorXd clipped = lambda;
  for (Eigen::Index i = 0; i < clipped.size(); ++i) {
    clipped(i) = clipped(i) < kClipTol * largest ? 0.0 : clipped(i);
  }
  const Eigen::MatrixXd factor =
      eig.eigenvectors() * clipped.cwiseSqrt().asDiagonal();

  // Per-point standardizers: q_g = || L_g^{-1} xi_g ||^2 with
  // diag[g] = L_g L_g'. Points whose diagonal block is numerically singular
  // are excluded from the sup, mirroring the skip rule of the statistic.
  std::vector<Eigen::MatrixXd> standardizer;
  std::vector<std::size_t> active;
  for (std::size_t g = 0; g < n_grid; ++g) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> deig(diag[g]);
    const double dmin = deig.eigenvalues()(0);
    const double dmax =
        deig.eigenvalues()(deig.eigenvalues().size() - 1);
    if (!(dmin > 0.0) || dmax / dmin > kConditionLimit) {
      continue;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(diag[g]);
    if (llt.info() != Eigen::Success) {
      continue;
    }
    standardizer.push_back(
        llt.matrixL().solve(Eigen::MatrixXd::Identity(
            static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k))));
    active.push_back(g);
  }
  if (active.empty()) {
    throw AllThresholdsSingular(
        "simulate_limit_process: every grid point has a singular kernel "
        "block");
  }

  std::vector<double> sups(cfg.n_sim);
  parallel_for(cfg.n_sim, threads, [&](std::size_t s) {
    Rng rng(derive_stream(cfg.seed, s));
    Eigen::VectorXd z(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      z(i) = rng.normal();
    }
    const Eigen::VectorXd xi = factor * z;
    double best = 0.0;
    bool first = true;
    Eigen::VectorXd y(static_cast<Eigen::Index>(k));
    for (std::size_t idx = 0; idx < active.size(); ++idx) {
      const std::size_t g = active[idx];
      y.noalias() =
          standardizer[idx] *
          xi.segment(static_cast<Eigen::Index>(g * k),
                     static_cast<Eigen::Index>(k));
      const double q = y.squaredNorm();
      if (first || q > best) {
        best = q;
        first = false;
      }
    }
    sups[s] = best;
  });
  std::sort(sups.begin(), sups.end());

  LimitSimResult result;
  result.levels = cfg.levels;
  result.grid_used = used.candidates;
  result.critical_values.reserve(cfg.levels.size());
  for (double level : cfg.levels) {
    result.critical_values.push_back(quantile_type7(sups, level));
  }
  result.sup_draws = std::move(sups);
  return result;
}

std::vector<double> asymptotic_critical_values(const TimeSeries& series,
                                               const ARFit& fit,
                                               const ThresholdGrid& grid,
                                               const LimitSimConfig& cfg,
                                               unsigned threads) {
  return simulate_limit_process(series, fit, grid, cfg, threads)
      .critical_values;
}

std::optional<double> CriticalValueTable::lookup(int dim, double pi_lower,
                                                 double pi_upper,
                                                 double level) const {
  constexpr double tol = 1e-9;
  for (const auto& e : entries) {
    if (e.dim == dim && std::abs(e.pi_lower - pi_lower) <= tol &&
        std::abs(e.pi_upper - pi_upper) <= tol &&
        std::abs(e.level - level) <= tol) {
      return e.value;
    }
  }
  return std::nullopt;
}

CriticalValueTable load_critical_value_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open critical-value table: " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw IoError("critical-value table is empty: " + path);
  }
  if (line != "dim,pi_lower,pi_upper,level,value") {
    throw IoError("critical-value table header must be "
                  "'dim,pi_lower,pi_upper,level,value': " +
                  path);
  }
  CriticalValueTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    std::istringstream row(line);
    CriticalValueTable::Entry e;
    char c1 = 0, c2 = 0, c3 = 0, c4 = 0;
    if (!(row >> e.dim >> c1 >> e.pi_lower >> c2 >> e.pi_upper >> c3 >>
          e.level >> c4 >> e.value) ||
        c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',') {
      throw IoError("malformed critical-value row at line " +
                    std::to_string(line_no) + " of " + path);
    }
    table.entries.push_back(e);
  }
  return table;
}

TestReport asymptotic_test(const TimeSeries& series, std::size_t p, int d,
                           double lower_q, double upper_q,
                           const LimitSimConfig& cfg, unsigned threads) {
  const SupLMResult observed =
      suplm_statistic(series, p, d, lower_q, upper_q);
  const LimitSimResult sim =
      simulate_limit_process(series, observed.fit, observed.grid, cfg,
                             threads);

  TestReport report;
  report.statistic = observed.statistic;
  report.argmax_threshold = observed.argmax_threshold;
  report.order = p;
  report.delay = d;
  report.lower_q = lower_q;
  report.upper_q = upper_q;
  report.grid_size = observed.grid.candidates.size();
  report.grid_skipped = observed.skipped.size();
  report.seed = cfg.seed;

  AsymptoticSummary part;
  part.levels = sim.levels;
  part.critical_values = sim.critical_values;
  part.p_value = sim.p_value(observed.statistic);
  part.n_sim = cfg.n_sim;
  report.asymptotic = std::move(part);
  return report;
}

}  // namespace tarlm
