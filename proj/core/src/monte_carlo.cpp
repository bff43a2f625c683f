#include "tarlm/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "tarlm/asymptotic.hpp"
#include "tarlm/bootstrap.hpp"
#include "tarlm/parallel.hpp"
#include "tarlm/simulate.hpp"
#include "tarlm/sup_lm.hpp"

namespace tarlm {

namespace {

using nlohmann::json;

// Fixed tags separating the stream spaces of the experiment types.
constexpr std::uint64_t kSizeTag = 0x73697A65ULL;    // "size"
constexpr std::uint64_t kPowerTag = 0x706F7765ULL;   // "powe"

struct ReplicateStats {
  bool ok = false;
  std::string reason;
  double statistic = std::numeric_limits<double>::quiet_NaN();
  double boot_p = std::numeric_limits<double>::quiet_NaN();
  double asym_p = std::numeric_limits<double>::quiet_NaN();
};

bool wants_bootstrap(TestKind kind) { return kind != TestKind::kAsymptotic; }
bool wants_asymptotic(TestKind kind) { return kind != TestKind::kBootstrap; }

ReplicateStats run_replicate(const ExperimentDesign& design, RngSeed cell) {
  ReplicateStats out;
  try {
    const RngSeed sim_key = derive_stream(cell, 0);
    const RngSeed boot_key = derive_stream(cell, 1);
    const RngSeed asym_key = derive_stream(cell, 2);

    TimeSeries series =
        std::holds_alternative<ARParams>(design.dgp)
            ? simulate_ar(std::get<ARParams>(design.dgp), design.n,
                          design.burn_in, sim_key)
            : simulate_tar(std::get<TARParams>(design.dgp), design.n,
                           design.burn_in, sim_key);

    const std::size_t p = design.order_policy.use_aic
                              ? select_order_aic(series,
                                                 design.order_policy.p_max)
                              : design.order_policy.fixed_p;

    const SupLMResult* observed = nullptr;
    SupLMResult plain;
    BootstrapReport boot;
    if (wants_bootstrap(design.test_kind)) {
      BootstrapConfig cfg;
      cfg.replicates = design.bootstrap_B;
      cfg.seed = boot_key;
      cfg.p = p;
      cfg.d = design.d;
      cfg.lower_q = design.lower_q;
      cfg.upper_q = design.upper_q;
      boot = bootstrap_test(series, cfg, 1);
      out.boot_p = boot.p_value;
      observed = &boot.observed;
    } else {
      plain = suplm_statistic(series, p, design.d, design.lower_q,
                              design.upper_q);
      observed = &plain;
    }
    out.statistic = observed->statistic;

    if (wants_asymptotic(design.test_kind)) {
      LimitSimConfig cfg;
      cfg.n_sim = design.asym_n_sim;
      cfg.levels = {1.0 - design.alpha};
      cfg.seed = asym_key;
      cfg.max_grid = design.asym_max_grid;
      const LimitSimResult sim = simulate_limit_process(
          series, observed->fit, observed->grid, cfg, 1);
      out.asym_p = sim.p_value(observed->statistic);
    }
    out.ok = true;
  } catch (const Error& err) {
    out.reason = err.what();
  }
  return out;
}

std::vector<ReplicateStats> run_design(const ExperimentDesign& design,
                                       RngSeed design_base, unsigned threads) {
  if (design.mc_reps < 1) {
    throw std::invalid_argument("experiment design '" + design.label +
                                "': mc_reps must be >= 1");
  }
  std::vector<ReplicateStats> stats(design.mc_reps);
  parallel_for(design.mc_reps, threads, [&](std::size_t rep) {
    stats[rep] = run_replicate(design, derive_stream(design_base, rep));
  });
  std::size_t failures = 0;
  for (const auto& s : stats) {
    if (!s.ok) {
      ++failures;
    }
  }
  if (static_cast<double>(failures) >
      0.05 * static_cast<double>(design.mc_reps)) {
    throw TooManyFailures("experiment design '" + design.label + "': " +
                          std::to_string(failures) + " of " +
                          std::to_string(design.mc_reps) +
                          " replicates failed");
  }
  return stats;
}

double percent_of(std::size_t count, std::size_t total) {
  return 100.0 * static_cast<double>(count) / static_cast<double>(total);
}

RejectionRow summarize_raw(const ExperimentDesign& design,
                           const std::vector<ReplicateStats>& stats) {
  RejectionRow row;
  row.label = design.label;
  row.n = design.n;
  row.mc_reps = design.mc_reps;
  std::size_t boot_rej = 0, asym_rej = 0;
  for (const auto& s : stats) {
    if (!s.ok) {
      ++row.failures;
      continue;
    }
    if (wants_bootstrap(design.test_kind) && s.boot_p < design.alpha) {
      ++boot_rej;
    }
    if (wants_asymptotic(design.test_kind) && s.asym_p < design.alpha) {
      ++asym_rej;
    }
  }
  if (wants_bootstrap(design.test_kind)) {
    row.slmb_rate = percent_of(boot_rej, design.mc_reps);
  }
  if (wants_asymptotic(design.test_kind)) {
    row.slma_rate = percent_of(asym_rej, design.mc_reps);
  }
  return row;
}

std::string format_cell(const std::optional<double>& value) {
  if (!value.has_value()) {
    return "";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", *value);
  return buf;
}

}  // namespace

std::string RejectionTable::to_csv() const {
  std::ostringstream out;
  out << "label,n,mc_reps,failures,slmb_percent,slma_percent,"
         "slmb_corrected_percent,slma_corrected_percent\n";
  for (const auto& row : rows) {
    out << row.label << ',' << row.n << ',' << row.mc_reps << ','
        << row.failures << ',' << format_cell(row.slmb_rate) << ','
        << format_cell(row.slma_rate) << ','
        << format_cell(row.slmb_corrected) << ','
        << format_cell(row.slma_corrected) << '\n';
  }
  return out.str();
}

std::string RejectionTable::to_text(const std::string& title) const {
  std::ostringstream out;
  if (!title.empty()) {
    out << title << '\n';
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-28s %6s %8s %8s %8s %8s %10s %10s\n",
                "design", "n", "reps", "fail", "sLMb", "sLMa", "sLMb.corr",
                "sLMa.corr");
  out << buf;
  auto cell = [](const std::optional<double>& v) -> std::string {
    if (!v.has_value()) return "-";
    char b[32];
    std::snprintf(b, sizeof(b), "%.1f", *v);
    return b;
  };
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%-28s %6zu %8zu %8zu %8s %8s %10s %10s\n",
                  row.label.c_str(), row.n, row.mc_reps, row.failures,
                  cell(row.slmb_rate).c_str(), cell(row.slma_rate).c_str(),
                  cell(row.slmb_corrected).c_str(),
                  cell(row.slma_corrected).c_str());
    out << buf;
  }
  return out.str();
}

RejectionTable run_size_experiment(const std::vector<ExperimentDesign>& designs,
                                   unsigned threads) {
  RejectionTable table;
  for (std::size_t i = 0; i < designs.size(); ++i) {
    const ExperimentDesign& design = designs[i];
    if (!std::holds_alternative<ARParams>(design.dgp)) {
      throw std::invalid_argument(
          "run_size_experiment: every design must have an AR (null) DGP");
    }
    const RngSeed base =
        derive_stream(derive_stream(design.seed, kSizeTag), i);
    table.rows.push_back(summarize_raw(design, run_design(design, base,
                                                          threads)));
  }
  return table;
}

RejectionTable run_power_experiment(const ExperimentDesign& null_design,
                                    const std::vector<ExperimentDesign>& alts,
                                    unsigned threads) {
  if (std::holds_alternative<TARParams>(null_design.dgp)) {
    const auto& tar = std::get<TARParams>(null_design.dgp);
    const bool zero =
        tar.delta_intercept == 0.0 &&
        std::all_of(tar.delta_coeffs.begin(), tar.delta_coeffs.end(),
                    [](double x) { return x == 0.0; });
    if (!zero) {
      throw std::invalid_argument(
          "run_power_experiment: null design must have zero threshold "
          "departure");
    }
  }

  // Common random numbers: the replicate stream depends only on (seed, rep),
  // so alternatives at the same seed share innovations with the null run.
  const auto base_for = [](const ExperimentDesign& d) {
    return derive_stream(d.seed, kPowerTag);
  };

  const std::vector<ReplicateStats> null_stats =
      run_design(null_design, base_for(null_design), threads);

  std::vector<double> null_statistics;
  std::vector<double> null_boot_ps;
  for (const auto& s : null_stats) {
    if (!s.ok) {
      continue;
    }
    null_statistics.push_back(s.statistic);
    if (wants_bootstrap(null_design.test_kind)) {
      null_boot_ps.push_back(s.boot_p);
    }
  }
  if (null_statistics.empty()) {
    throw TooManyFailures(
        "run_power_experiment: no successful null replicates");
  }

  RejectionTable table;
  for (const auto& alt : alts) {
    const std::vector<ReplicateStats> stats =
        run_design(alt, base_for(alt), threads);
    RejectionRow row = summarize_raw(alt, stats);

    const double stat_cutoff =
        quantile_type7(null_statistics, 1.0 - alt.alpha);
    std::size_t corr_asym = 0, corr_boot = 0;
    for (const auto& s : stats) {
      if (!s.ok) {
        continue;
      }
      if (s.statistic > stat_cutoff) {
        ++corr_asym;
      }
    }
    if (wants_asymptotic(alt.test_kind)) {
      row.slma_corrected = percent_of(corr_asym, alt.mc_reps);
    }
    if (wants_bootstrap(alt.test_kind)) {
      if (null_boot_ps.empty()) {
        throw std::invalid_argument(
            "run_power_experiment: null design lacks bootstrap p-values "
            "needed to size-correct the bootstrap test");
      }
      const double p_cutoff = quantile_type7(null_boot_ps, alt.alpha);
      for (const auto& s : stats) {
        if (s.ok && s.boot_p < p_cutoff) {
          ++corr_boot;
        }
      }
      row.slmb_corrected = percent_of(corr_boot, alt.mc_reps);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

RejectionTable run_order_selection_experiment(
    const std::vector<ExperimentDesign>& designs, unsigned threads) {
  return run_size_experiment(designs, threads);
}

namespace {

[[noreturn]] void config_fail(const std::string& path, const std::string& what) {
  throw ConfigError("experiment config: " + path + ": " + what);
}

template <typename T>
T require(const json& node, const std::string& path, const char* key) {
  if (!node.contains(key)) {
    config_fail(path + "." + key, "missing");
  }
  try {
    return node.at(key).get<T>();
  } catch (const json::exception& e) {
    config_fail(path + "." + key, e.what());
  }
}

template <typename T>
T optional_or(const json& node, const std::string& path, const char* key,
              T fallback) {
  if (!node.contains(key)) {
    return fallback;
  }
  try {
    return node.at(key).get<T>();
  } catch (const json::exception& e) {
    config_fail(path + "." + key, e.what());
  }
}

ARParams parse_ar(const json& node, const std::string& path) {
  ARParams ar;
  ar.intercept = require<double>(node, path, "phi0");
  ar.coeffs = require<std::vector<double>>(node, path, "phi");
  ar.noise_sd = optional_or<double>(node, path, "noise_sd", 1.0);
  if (!(ar.noise_sd > 0.0)) {
    config_fail(path + ".noise_sd", "must be positive");
  }
  return ar;
}

TARParams parse_tar(const json& node, const std::string& path, int default_d) {
  TARParams tar;
  tar.base = parse_ar(node, path);
  tar.delta_intercept = require<double>(node, path, "delta0");
  tar.delta_coeffs = require<std::vector<double>>(node, path, "delta");
  if (tar.delta_coeffs.size() != tar.base.coeffs.size()) {
    config_fail(path + ".delta", "length must match phi");
  }
  tar.threshold = optional_or<double>(node, path, "threshold", 0.0);
  tar.delay = optional_or<int>(node, path, "delay", default_d);
  if (tar.delay < 1) {
    config_fail(path + ".delay", "must be >= 1");
  }
  return tar;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment config: not valid JSON: ") +
                      e.what());
  }
  const std::string root = "$";

  ExperimentConfig cfg;
  cfg.kind = require<std::string>(doc, root, "experiment");
  if (cfg.kind != "size" && cfg.kind != "power" &&
      cfg.kind != "order_selection") {
    config_fail("$.experiment",
                "must be one of size | power | order_selection");
  }
  cfg.name = optional_or<std::string>(doc, root, "name", "experiment");

  ExperimentDesign base;
  base.seed.seed = require<std::uint64_t>(doc, root, "seed");
  base.seed.stream_id = optional_or<std::uint64_t>(doc, root, "stream", 0);
  cfg.master_seed = base.seed;
  base.alpha = optional_or<double>(doc, root, "alpha", 0.05);
  if (!(base.alpha > 0.0 && base.alpha < 1.0)) {
    config_fail("$.alpha", "must lie in (0, 1)");
  }
  base.d = optional_or<int>(doc, root, "d", 1);
  if (base.d < 1) {
    config_fail("$.d", "must be >= 1");
  }
  base.lower_q = optional_or<double>(doc, root, "qlo", 0.25);
  base.upper_q = optional_or<double>(doc, root, "qhi", 0.75);
  if (!(base.lower_q > 0.0 && base.lower_q < base.upper_q &&
        base.upper_q < 1.0)) {
    config_fail("$.qlo/qhi", "need 0 < qlo < qhi < 1");
  }
  base.mc_reps = require<std::size_t>(doc, root, "mc_reps");
  if (base.mc_reps < 1) {
    config_fail("$.mc_reps", "must be >= 1");
  }
  base.bootstrap_B = optional_or<std::size_t>(doc, root, "B", 399);
  base.burn_in = optional_or<std::size_t>(doc, root, "burn_in", 500);

  const std::string kind_str =
      optional_or<std::string>(doc, root, "test", "bootstrap");
  if (kind_str == "bootstrap") {
    base.test_kind = TestKind::kBootstrap;
  } else if (kind_str == "asymptotic") {
    base.test_kind = TestKind::kAsymptotic;
  } else if (kind_str == "both") {
    base.test_kind = TestKind::kBoth;
  } else {
    config_fail("$.test", "must be bootstrap | asymptotic | both");
  }

  if (!doc.contains("order")) {
    config_fail("$.order", "missing");
  }
  const json& order = doc.at("order");
  const std::string policy = require<std::string>(order, "$.order", "policy");
  if (policy == "fixed") {
    base.order_policy = OrderPolicy::fixed(
        require<std::size_t>(order, "$.order", "p"));
  } else if (policy == "aic") {
    base.order_policy =
        OrderPolicy::aic(require<std::size_t>(order, "$.order", "p_max"));
    if (base.order_policy.p_max < 1) {
      config_fail("$.order.p_max", "must be >= 1");
    }
  } else {
    config_fail("$.order.policy", "must be fixed | aic");
  }

  if (doc.contains("asymptotic")) {
    const json& asym = doc.at("asymptotic");
    base.asym_n_sim =
        optional_or<std::size_t>(asym, "$.asymptotic", "n_sim", 2000);
    base.asym_max_grid =
        optional_or<std::size_t>(asym, "$.asymptotic", "max_grid", 64);
    if (base.asym_n_sim < 100) {
      config_fail("$.asymptotic.n_sim", "must be >= 100");
    }
  }

  cfg.n_values = require<std::vector<std::size_t>>(doc, root, "n");
  if (cfg.n_values.empty()) {
    config_fail("$.n", "must list at least one sample size");
  }

  if (cfg.kind == "power") {
    if (!doc.contains("null")) {
      config_fail("$.null", "missing (required for power experiments)");
    }
    ExperimentDesign null_d = base;
    null_d.dgp = parse_tar(doc.at("null"), "$.null", base.d);
    null_d.label = optional_or<std::string>(doc.at("null"), "$.null", "label",
                                            "null");
    cfg.null_design = null_d;

    if (!doc.contains("alts") || !doc.at("alts").is_array() ||
        doc.at("alts").empty()) {
      config_fail("$.alts", "must be a nonempty array");
    }
    std::size_t idx = 0;
    for (const auto& node : doc.at("alts")) {
      const std::string path = "$.alts[" + std::to_string(idx) + "]";
      ExperimentDesign alt = base;
      alt.dgp = parse_tar(node, path, base.d);
      alt.label = optional_or<std::string>(node, path, "label",
                                           "alt" + std::to_string(idx));
      cfg.alt_designs.push_back(std::move(alt));
      ++idx;
    }
  } else {
    if (!doc.contains("designs") || !doc.at("designs").is_array() ||
        doc.at("designs").empty()) {
      config_fail("$.designs", "must be a nonempty array");
    }
    if (cfg.kind == "order_selection" && !base.order_policy.use_aic) {
      config_fail("$.order.policy",
                  "order_selection experiments require the aic policy");
    }
    std::size_t idx = 0;
    for (const auto& node : doc.at("designs")) {
      const std::string path = "$.designs[" + std::to_string(idx) + "]";
      ARParams ar = parse_ar(node, path);
      const std::string label = optional_or<std::string>(
          node, path, "label", "design" + std::to_string(idx));
      for (std::size_t n : cfg.n_values) {
        ExperimentDesign design = base;
        design.dgp = ar;
        design.n = n;
        design.label = label;
        cfg.designs.push_back(std::move(design));
      }
      ++idx;
    }
  }
  return cfg;
}

ExperimentRun run_experiment(const ExperimentConfig& cfg, unsigned threads) {
  ExperimentRun run;
  run.name = cfg.name;
  if (cfg.kind == "size") {
    run.table = run_size_experiment(cfg.designs, threads);
  } else if (cfg.kind == "order_selection") {
    run.table = run_order_selection_experiment(cfg.designs, threads);
  } else if (cfg.kind == "power") {
    for (std::size_t n : cfg.n_values) {
      ExperimentDesign null_d = *cfg.null_design;
      null_d.n = n;
      std::vector<ExperimentDesign> alts = cfg.alt_designs;
      for (auto& alt : alts) {
        alt.n = n;
      }
      RejectionTable part = run_power_experiment(null_d, alts, threads);
      for (auto& row : part.rows) {
        run.table.rows.push_back(std::move(row));
      }
    }
  } else {
    throw ConfigError("run_experiment: unknown kind '" + cfg.kind + "'");
  }
  return run;
}

}  // namespace tarlm
