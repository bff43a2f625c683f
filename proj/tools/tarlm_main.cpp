// Command-line front end: single-series threshold testing, Monte Carlo
// experiment runner, and periodogram emission.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tarlm/asymptotic.hpp"
#include "tarlm/bootstrap.hpp"
#include "tarlm/monte_carlo.hpp"
#include "tarlm/periodogram.hpp"
#include "tarlm/report.hpp"
#include "tarlm/series_io.hpp"
#include "tarlm/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitStatistical = 2;

// Substream tag separating the asymptotic draws from the bootstrap
// replicates (which use children 1..B of the master seed).
constexpr std::uint64_t kAsymTag = 0xA5A5A5A5A5ULL;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("TARLM_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw tarlm::IoError("TARLM_SEED is not a valid unsigned integer");
    }
  }
  return 0;
}

struct TestOptions {
  std::string file;
  std::string column = "0";
  bool sqrt_transform = false;
  std::string p = "auto";
  std::size_t pmax = 5;
  int d = 1;
  std::size_t B = 1000;
  std::optional<std::uint64_t> seed;
  std::uint64_t stream = 0;
  double qlo = 0.25;
  double qhi = 0.75;
  std::string mode = "bootstrap";
  double alpha = 0.05;
  std::size_t n_sim = 10000;
  std::size_t max_grid = 200;
  std::string cv_kernel = "pivotal";
  bool frozen_grid = false;
  unsigned threads = 0;
  std::string json_path;
  std::string cv_table;
};

int run_test(const TestOptions& opt) {
  tarlm::SeriesFile sf;
  sf.path = opt.file;
  sf.column = opt.column;
  sf.sqrt_transform = opt.sqrt_transform;
  const tarlm::TimeSeries series = tarlm::read_series_csv(sf);

  const tarlm::RngSeed master{opt.seed ? *opt.seed : default_seed(),
                              opt.stream};

  std::size_t p = 0;
  bool auto_order = false;
  if (opt.p == "auto") {
    auto_order = true;
    p = tarlm::select_order_aic(series, opt.pmax);
  } else {
    const bool digits =
        !opt.p.empty() && opt.p.find_first_not_of("0123456789") ==
                              std::string::npos;
    if (!digits) {
      throw tarlm::IoError("--p must be 'auto' or a nonnegative integer");
    }
    p = std::stoull(opt.p);
  }

  tarlm::TestReport report;
  report.order = p;
  report.order_selected_by_aic = auto_order;
  report.delay = opt.d;
  report.lower_q = opt.qlo;
  report.upper_q = opt.qhi;
  report.seed = master;

  const bool want_boot = opt.mode == "bootstrap" || opt.mode == "both";
  const bool want_asym = opt.mode == "asymptotic" || opt.mode == "both";

  const tarlm::SupLMResult* observed = nullptr;
  tarlm::SupLMResult plain;
  tarlm::BootstrapReport boot;
  if (want_boot) {
    tarlm::BootstrapConfig cfg;
    cfg.replicates = opt.B;
    cfg.seed = master;
    cfg.p = p;
    cfg.d = opt.d;
    cfg.lower_q = opt.qlo;
    cfg.upper_q = opt.qhi;
    cfg.grid_policy = opt.frozen_grid
                          ? tarlm::GridPolicy::kFreezeObserved
                          : tarlm::GridPolicy::kRefreshPerSample;
    boot = tarlm::bootstrap_test(series, cfg, opt.threads);
    observed = &boot.observed;

    tarlm::BootstrapSummary part;
    part.p_value = boot.p_value;
    part.replicates = opt.B;
    part.successes = boot.boot_stats.size();
    part.failures = boot.failures.size();
    report.bootstrap = part;
  } else {
    plain = tarlm::suplm_statistic(series, p, opt.d, opt.qlo, opt.qhi);
    observed = &plain;
  }
  report.statistic = observed->statistic;
  report.argmax_threshold = observed->argmax_threshold;
  report.grid_size = observed->grid.candidates.size();
  report.grid_skipped = observed->skipped.size();

  if (want_asym) {
    tarlm::LimitSimConfig cfg;
    cfg.n_sim = opt.n_sim;
    cfg.levels = {0.90, 0.95, 0.99};
    cfg.seed = tarlm::derive_stream(master, kAsymTag);
    cfg.max_grid = opt.max_grid;
    cfg.kernel = opt.cv_kernel == "sample"
                     ? tarlm::KernelSource::kSampleMoments
                     : opt.cv_kernel == "model"
                           ? tarlm::KernelSource::kFittedModel
                           : tarlm::KernelSource::kPivotal;
    const tarlm::LimitSimResult sim = tarlm::simulate_limit_process(
        series, observed->fit, observed->grid, cfg, opt.threads);

    tarlm::AsymptoticSummary part;
    part.levels = sim.levels;
    part.critical_values = sim.critical_values;
    part.p_value = sim.p_value(observed->statistic);
    part.n_sim = opt.n_sim;
    if (!opt.cv_table.empty()) {
      const tarlm::CriticalValueTable table =
          tarlm::load_critical_value_table(opt.cv_table);
      part.table_critical_value =
          table.lookup(static_cast<int>(p + 1), opt.qlo, opt.qhi,
                       1.0 - opt.alpha);
    }
    report.asymptotic = std::move(part);
  }

  tarlm::ReportContext ctx;
  ctx.source = opt.file;
  ctx.column = opt.column;
  ctx.sqrt_transform = opt.sqrt_transform;
  ctx.n = series.size();
  ctx.alpha = opt.alpha;

  std::cout << tarlm::render_test_report_text(report, ctx);
  if (!opt.json_path.empty()) {
    const std::string json = tarlm::render_test_report_json(report, ctx);
    if (opt.json_path == "-") {
      std::cout << json;
    } else {
      std::ofstream out(opt.json_path);
      if (!out) {
        throw tarlm::IoError("cannot write JSON report to " + opt.json_path);
      }
      out << json;
    }
  }
  return kExitOk;
}

struct McOptions {
  std::string config;
  std::string out_dir;
  unsigned threads = 0;
};

int run_mc(const McOptions& opt) {
  std::ifstream in(opt.config);
  if (!in) {
    throw tarlm::IoError("cannot open config file: " + opt.config);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();

  const tarlm::ExperimentConfig cfg =
      tarlm::parse_experiment_config(buffer.str());

  std::filesystem::create_directories(opt.out_dir);

  const auto start = std::chrono::steady_clock::now();
  const tarlm::ExperimentRun run = tarlm::run_experiment(cfg, opt.threads);
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();

  const std::filesystem::path dir(opt.out_dir);
  const std::string csv_name = run.name + ".csv";
  const std::string txt_name = run.name + ".txt";
  {
    std::ofstream csv(dir / csv_name);
    if (!csv) {
      throw tarlm::IoError("cannot write " + (dir / csv_name).string());
    }
    csv << run.table.to_csv();
  }
  {
    std::ofstream txt(dir / txt_name);
    txt << run.table.to_text(run.name);
  }
  // The manifest is the only output carrying wall-clock data; the tables
  // above are byte-stable across reruns.
  {
    nlohmann::ordered_json manifest;
    manifest["name"] = run.name;
    manifest["library_version"] = tarlm::kLibraryVersion;
    manifest["seed"] = {{"seed", cfg.master_seed.seed},
                        {"stream", cfg.master_seed.stream_id}};
    manifest["config_file"] = opt.config;
    manifest["tables"] = {csv_name, txt_name};
    manifest["threads_requested"] = opt.threads;
    manifest["elapsed_ms"] = elapsed;
    std::ofstream mf(dir / "manifest.json");
    mf << manifest.dump(2) << "\n";
  }
  std::cout << run.table.to_text(run.name);
  return kExitOk;
}

struct SpectrumOptions {
  std::string file;
  std::string column = "0";
  bool sqrt_transform = false;
  std::string out = "-";
};

int run_spectrum(const SpectrumOptions& opt) {
  tarlm::SeriesFile sf;
  sf.path = opt.file;
  sf.column = opt.column;
  sf.sqrt_transform = opt.sqrt_transform;
  const tarlm::TimeSeries series = tarlm::read_series_csv(sf);
  const tarlm::Periodogram pg = tarlm::periodogram(series);
  if (opt.out == "-") {
    std::cout << pg.to_csv();
  } else {
    std::ofstream out(opt.out);
    if (!out) {
      throw tarlm::IoError("cannot write periodogram to " + opt.out);
    }
    out << pg.to_csv();
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"supLM threshold tests for autoregressive time series"};
  app.set_version_flag("--version", tarlm::kLibraryVersion);
  app.require_subcommand(1);

  TestOptions topt;
  CLI::App* test = app.add_subcommand(
      "test", "Test one series for a threshold effect");
  test->add_option("--file", topt.file, "Input CSV file")->required();
  test->add_option("--column", topt.column, "Column name or 0-based index");
  test->add_flag("--sqrt", topt.sqrt_transform,
                 "Square-root transform the series");
  test->add_option("--p", topt.p, "AR order: 'auto' (AIC) or an integer");
  test->add_option("--pmax", topt.pmax, "AIC search bound for --p auto");
  test->add_option("--d", topt.d, "Delay of the threshold variable");
  test->add_option("--B", topt.B, "Bootstrap replicates");
  topt.seed = std::nullopt;
  auto* seed_opt = test->add_option("--seed", "Master seed (default: TARLM_SEED env or 0)");
  test->add_option("--stream", topt.stream, "Master stream id");
  test->add_option("--qlo", topt.qlo, "Lower quantile of the search interval");
  test->add_option("--qhi", topt.qhi, "Upper quantile of the search interval");
  test->add_option("--mode", topt.mode, "bootstrap | asymptotic | both")
      ->check(CLI::IsMember({"bootstrap", "asymptotic", "both"}));
  test->add_option("--alpha", topt.alpha, "Level for the printed decision");
  test->add_option("--nsim", topt.n_sim, "Limit-process draws (asymptotic)");
  test->add_option("--max-grid", topt.max_grid,
                   "Grid thinning bound for the limit simulation");
  test->add_option("--cv-kernel", topt.cv_kernel,
                   "Limit-kernel plug-in: pivotal | model | sample")
      ->check(CLI::IsMember({"pivotal", "model", "sample"}));
  test->add_flag("--frozen-grid", topt.frozen_grid,
                 "Freeze the observed grid across bootstrap samples");
  test->add_option("--threads", topt.threads, "Worker threads (0 = all)");
  test->add_option("--json", topt.json_path, "Write JSON report ('-' = stdout)");
  test->add_option("--cv-table", topt.cv_table,
                   "External critical-value table (CSV) for comparison");

  McOptions mopt;
  CLI::App* mc = app.add_subcommand("mc", "Run a Monte Carlo experiment file");
  mc->add_option("--config", mopt.config, "Experiment config (JSON)")
      ->required();
  mc->add_option("--out-dir", mopt.out_dir, "Output directory")->required();
  mc->add_option("--threads", mopt.threads, "Worker threads (0 = all)");

  SpectrumOptions sopt;
  CLI::App* spectrum =
      app.add_subcommand("spectrum", "Emit the raw periodogram as CSV");
  spectrum->add_option("--file", sopt.file, "Input CSV file")->required();
  spectrum->add_option("--column", sopt.column, "Column name or 0-based index");
  spectrum->add_flag("--sqrt", sopt.sqrt_transform,
                     "Square-root transform the series");
  spectrum->add_option("--out", sopt.out, "Output CSV path ('-' = stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (seed_opt->count() > 0) {
      topt.seed = seed_opt->as<std::uint64_t>();
    }
    if (test->parsed()) {
      return run_test(topt);
    }
    if (mc->parsed()) {
      return run_mc(mopt);
    }
    if (spectrum->parsed()) {
      return run_spectrum(sopt);
    }
  } catch (const tarlm::IoError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitIo;
  } catch (const tarlm::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitStatistical;
  } catch (const CLI::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitStatistical;
  }
  return kExitOk;
}
