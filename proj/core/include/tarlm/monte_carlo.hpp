#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tarlm/rng.hpp"
#include "tarlm/time_series.hpp"

namespace tarlm {

enum class TestKind { kBootstrap, kAsymptotic, kBoth };

struct OrderPolicy {
  bool use_aic = false;
  std::size_t fixed_p = 1;  // tested order when !use_aic
  std::size_t p_max = 5;    // AIC search bound when use_aic

  static OrderPolicy fixed(std::size_t p) { return {false, p, p}; }
  static OrderPolicy aic(std::size_t p_max) { return {true, 1, p_max}; }
};

/// One Monte Carlo cell: a data-generating process, a sample size and the
/// full test configuration. Replicate streams are derived from the seed, so
/// a design reruns bit-identically for any worker count.
struct ExperimentDesign {
  std::variant<ARParams, TARParams> dgp;
  std::size_t n = 100;
  std::size_t mc_reps = 500;
  std::size_t bootstrap_B = 399;
  double alpha = 0.05;
  OrderPolicy order_policy = OrderPolicy::fixed(1);
  TestKind test_kind = TestKind::kBootstrap;
  RngSeed seed;
  int d = 1;
  double lower_q = 0.25;
  double upper_q = 0.75;
  std::size_t burn_in = 500;
  std::size_t asym_n_sim = 2000;   // limit-process draws per replicate
  std::size_t asym_max_grid = 64;  // grid thinning inside the MC loop
  std::string label;
};

struct RejectionRow {
  std::string label;
  std::size_t n = 0;
  std::size_t mc_reps = 0;
  std::size_t failures = 0;
  std::optional<double> slmb_rate;       // percent, bootstrap test
  std::optional<double> slma_rate;       // percent, asymptotic test
  std::optional<double> slmb_corrected;  // percent, size-corrected power
  std::optional<double> slma_corrected;
};

struct RejectionTable {
  std::vector<RejectionRow> rows;

  /// Fixed column order:
  /// label,n,mc_reps,failures,slmb_percent,slma_percent,
  /// slmb_corrected_percent,slma_corrected_percent
  /// with empty cells for metrics the experiment did not produce.
  std::string to_csv() const;
  std::string to_text(const std::string& title = {}) const;
};

/// Empirical size: every dgp must be an ARParams (a null process). Rates are
/// 100 * rejections / mc_reps at each design's alpha. Per-replicate failures
/// are recorded in the row; above 5% of mc_reps the design throws
/// TooManyFailures.
RejectionTable run_size_experiment(const std::vector<ExperimentDesign>& designs,
                                   unsigned threads = 0);

/// Raw and size-corrected power. The null design is run first; the
/// alternatives reuse its replicate streams (common random numbers), so an
/// alternative identical to the null reproduces its draws exactly. The
/// corrected columns apply empirical null critical values: the (1-alpha)
/// quantile of the null statistics for the asymptotic test and the alpha
/// quantile of the null bootstrap p-values for the bootstrap test.
RejectionTable run_power_experiment(const ExperimentDesign& null_design,
                                    const std::vector<ExperimentDesign>& alts,
                                    unsigned threads = 0);

/// Size/power with the order re-selected per replicate. Same machinery as
/// run_size_experiment; with a fixed-order policy the output is bit-identical
/// to it.
RejectionTable run_order_selection_experiment(
    const std::vector<ExperimentDesign>& designs, unsigned threads = 0);

/// Declarative experiment file (JSON; schema documented in the README).
struct ExperimentConfig {
  std::string kind;  // "size" | "power" | "order_selection"
  std::string name;
  RngSeed master_seed;
  std::vector<ExperimentDesign> designs;        // size / order_selection
  std::optional<ExperimentDesign> null_design;  // power, per n
  std::vector<ExperimentDesign> alt_designs;    // power
  std::vector<std::size_t> n_values;
};

/// Parse a config document. Throws ConfigError naming the offending key.
ExperimentConfig parse_experiment_config(const std::string& json_text);

struct ExperimentRun {
  std::string name;
  RejectionTable table;
};

/// Run a parsed config: size/order_selection designs directly, power once
/// per sample size with the matched null.
ExperimentRun run_experiment(const ExperimentConfig& cfg, unsigned threads = 0);

}  // namespace tarlm
