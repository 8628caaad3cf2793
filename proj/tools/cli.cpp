#include "cli.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "igl/backtest.hpp"
#include "igl/csv.hpp"
#include "igl/errors.hpp"
#include "igl/model_selection.hpp"
#include "igl/report_io.hpp"
#include "igl/simulation.hpp"

namespace igl::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

struct NotConverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputOptions {
  std::string lower;
  std::string upper;
  std::string intervals;
};

struct FitOptions {
  InputOptions in;
  double lambda = 0.0;
  bool autoselect = false;
  double eps = 0.0;
  int max_sweeps = 100;
  int count = kDefaultGridCount;
  double ratio = kDefaultGridRatio;
  bool strict = false;
  std::string out = ".";
};

struct SelectOptions {
  InputOptions in;
  double eps = 0.0;
  int max_sweeps = 100;
  int count = kDefaultGridCount;
  double ratio = kDefaultGridRatio;
  bool cold = false;
  int jobs = 1;
  std::string out = ".";
};

struct SimulateOptions {
  std::string config;
  std::string out = ".";
  int jobs = 1;
};

struct BacktestOptions {
  std::string ohlc;
  std::vector<std::string> strategies;
  long est_window = 252;
  long hold = 21;
  std::vector<long> spans;
  std::string mu_source = "strategy";
  int count = kDefaultGridCount;
  double ratio = kDefaultGridRatio;
  int jobs = 1;
  std::string out = ".";
};

int verbosity = 0;

void log(int level, const std::string& msg) {
  if (verbosity >= level) std::cerr << msg << '\n';
}

void add_input_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--lower", in.lower, "CSV of lower bounds (header row of names)");
  cmd->add_option("--upper", in.upper, "CSV of upper bounds with the same header");
  cmd->add_option("--intervals", in.intervals, "single CSV with <name>_l / <name>_u columns");
}

IntervalMatrix load_intervals(const InputOptions& in) {
  if (!in.intervals.empty()) {
    if (!in.lower.empty() || !in.upper.empty()) throw InputError("give either --intervals or --lower/--upper");
    return csv::read_interval_columns(in.intervals);
  }
  if (in.lower.empty() || in.upper.empty()) throw InputError("need --lower and --upper (or --intervals)");
  return csv::read_interval_pair(in.lower, in.upper);
}

Json input_json(const InputOptions& in) {
  return Json{{"lower", in.lower}, {"upper", in.upper}, {"intervals", in.intervals}};
}

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw InputError("cannot create output directory " + dir);
  return fs::path(dir);
}

void write_json(const fs::path& path, const Json& j) { csv::write_file(path.string(), j.dump(2) + "\n"); }

std::string slug(std::string s) {
  for (char& c : s) {
    if (c == '/') c = '_';
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return s == "1_n" ? "one_over_n" : s;
}

int cmd_fit(const FitOptions& o) {
  const IntervalMatrix x = load_intervals(o.in);
  const CovariancePair cov = bound_covariances(x);
  const fs::path out = prepare_out(o.out);

  SolverConfig cfg;
  cfg.epsilon = o.eps;
  cfg.max_sweeps = o.max_sweeps;
  Json record;
  IGLFit fit;
  double lambda = o.lambda;
  if (o.autoselect) {
    const LambdaGrid grid = lambda_grid(cov.pooled, o.count, o.ratio);
    const PathResult path = select_lambda(cov, grid.values, cov.n, cfg);
    fit = path.selected();
    lambda = fit.lambda;
    record = io::fit_to_json(fit);
    record["selection"] = io::path_to_json(path);
    record["selection"]["degenerate_grid"] = grid.degenerate;
  } else {
    cfg.lambda = lambda;
    fit = igl_fit(cov, cfg);
    record = io::fit_to_json(fit);
  }
  record["epsilon"] = cfg.epsilon_for(cov.p());
  record["n"] = cov.n;
  record["labels"] = x.labels();
  record["kkt"] = io::kkt_to_json(kkt_check(fit, cov, lambda));
  record["eigen_bounds"] = io::bounds_to_json(eigen_bounds_check(fit, cov, lambda));

  csv::write_file((out / "theta.csv").string(), csv::format_matrix(fit.theta_hat, x.labels()));
  csv::write_file((out / "sigma.csv").string(), csv::format_matrix(fit.sigma_hat, x.labels()));
  write_json(out / "fit.json", record);

  Json config{{"input", input_json(o.in)}, {"lambda", o.lambda}, {"auto", o.autoselect},
              {"eps", o.eps}, {"max_sweeps", o.max_sweeps}, {"count", o.count}, {"ratio", o.ratio}};
  write_json(out / "manifest.json", io::manifest("fit", config, 0));
  log(1, "fit: lambda=" + csv::number(lambda) + " gap=" + csv::number(fit.gap) +
             " sweeps=" + std::to_string(fit.sweeps));
  if (!fit.converged && o.strict) throw NotConverged("fit did not reach the duality-gap tolerance");
  return kOk;
}

int cmd_select(const SelectOptions& o) {
  const IntervalMatrix x = load_intervals(o.in);
  const CovariancePair cov = bound_covariances(x);
  const fs::path out = prepare_out(o.out);
  SolverConfig cfg;
  cfg.epsilon = o.eps;
  cfg.max_sweeps = o.max_sweeps;
  const LambdaGrid grid = lambda_grid(cov.pooled, o.count, o.ratio);
  PathOptions popts;
  popts.warm_start = !o.cold;
  PathResult path;
  {
#ifdef _OPENMP
    // Cold paths parallelize across lambdas.
    if (o.cold && o.jobs > 0) omp_set_num_threads(o.jobs);
#endif
    path = select_lambda(cov, grid.values, cov.n, cfg, popts);
  }
  csv::write_file((out / "path.csv").string(), io::path_csv(path));
  Json record = io::fit_to_json(path.selected());
  record["selection"] = io::path_to_json(path);
  record["selection"]["degenerate_grid"] = grid.degenerate;
  write_json(out / "fit.json", record);
  Json config{{"input", input_json(o.in)}, {"eps", o.eps}, {"max_sweeps", o.max_sweeps},
              {"count", o.count}, {"ratio", o.ratio}, {"cold", o.cold}};
  write_json(out / "manifest.json", io::manifest("select", config, 0));
  log(1, "select: lambda=" + csv::number(path.selected().lambda));
  return kOk;
}

int cmd_simulate(const SimulateOptions& o) {
  Json cj;
  try {
    cj = Json::parse(csv::read_file(o.config));
  } catch (const Json::parse_error& ex) {
    throw InvalidConfig(std::string("config is not valid JSON: ") + ex.what());
  }
  const sim::ExperimentConfig cfg = io::experiment_from_json(cj);
  const fs::path out = prepare_out(o.out);
  log(1, "simulate: " + std::to_string(sim::enumerate_cells(cfg).size()) + " cells x " +
             std::to_string(cfg.reps) + " reps");
  const sim::ReplicationResult result = sim::run_replications(cfg, o.jobs);
  csv::write_file((out / "long.csv").string(), sim::long_csv(result));
  csv::write_file((out / "tables.csv").string(), sim::tables_csv(cfg, result));
  csv::write_file((out / "failures.csv").string(), sim::failures_csv(result));
  write_json(out / "manifest.json", io::manifest("simulate", io::experiment_to_json(cfg), cfg.master_seed));
  if (!result.failures.empty()) {
    log(0, "simulate: " + std::to_string(result.failures.size()) + " replication(s) failed, see failures.csv");
  }
  return kOk;
}

int cmd_backtest(const BacktestOptions& o) {
  std::vector<std::string> warnings;
  const backtest::OhlcPanel panel = backtest::load_ohlc(o.ohlc, &warnings);
  for (const auto& w : warnings) log(1, "backtest: " + w);

  std::vector<backtest::Strategy> strategies;
  if (o.strategies.empty()) {
    strategies.assign(std::begin(backtest::kAllStrategies), std::end(backtest::kAllStrategies));
  } else {
    for (const auto& s : o.strategies) strategies.push_back(backtest::parse_strategy(s));
  }
  backtest::BacktestConfig cfg;
  cfg.est_window = o.est_window;
  cfg.hold = o.hold;
  cfg.grid_count = o.count;
  cfg.grid_ratio = o.ratio;
  if (o.mu_source == "close") {
    cfg.mu_source = backtest::MuSource::close;
  } else if (o.mu_source != "strategy") {
    throw InvalidConfig("--mu-source must be 'strategy' or 'close'");
  }
  const fs::path out = prepare_out(o.out);

  std::vector<long> spans = o.spans;
  if (spans.empty()) spans.push_back(0);
  std::vector<io::Horizon> horizons;
  for (long span : spans) {
    if (span < 0) throw InvalidConfig("--span must be non-negative");
    if (span > 0 && panel.days() < cfg.est_window + span) {
      throw InvalidConfig("panel too short for --span " + std::to_string(span));
    }
    const backtest::OhlcPanel sub = span > 0 ? backtest::tail(panel, cfg.est_window + span) : panel;
    const std::string label = span > 0 ? std::to_string(span) + "d" : "full";
    const std::string suffix = spans.size() > 1 ? "_" + label : "";
    log(1, "backtest: horizon " + label + ", " + std::to_string(sub.days()) + " days");
    const auto reports = backtest::run_strategies(sub, strategies, cfg, o.jobs);
    io::Horizon h{label, {}};
    for (const auto& rep : reports) {
      const auto perf = backtest::performance(rep);
      const std::string name = slug(backtest::to_string(rep.strategy));
      write_json(out / ("report_" + name + suffix + ".json"), io::backtest_to_json(rep, perf));
      csv::write_file((out / ("weights_" + name + suffix + ".csv")).string(), io::weights_csv(rep, sub));
      h.results.emplace_back(rep.strategy, perf);
    }
    horizons.push_back(std::move(h));
  }
  csv::write_file((out / "comparison.csv").string(), io::comparison_csv(horizons));

  Json strat = Json::array();
  for (auto s : strategies) strat.push_back(backtest::to_string(s));
  Json config{{"ohlc", o.ohlc}, {"strategies", strat}, {"est_window", o.est_window}, {"hold", o.hold},
              {"spans", spans}, {"mu_source", o.mu_source}, {"count", o.count}, {"ratio", o.ratio}};
  write_json(out / "manifest.json", io::manifest("backtest", config, 0));
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Interval graphical lasso: sparse precision estimation for interval-valued data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", io::kToolVersion);
  int verbose = 0;
  app.add_flag("-v,--verbose", verbose, "progress on standard error (repeat for more)");

  FitOptions fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "fit at one lambda or with BIC selection");
  add_input_options(fit_cmd, fit.in);
  auto* lambda_opt = fit_cmd->add_option("--lambda", fit.lambda, "penalty (on the doubled-likelihood scale)");
  auto* auto_opt = fit_cmd->add_flag("--auto", fit.autoselect, "select lambda by BIC over a log grid");
  lambda_opt->excludes(auto_opt);
  fit_cmd->add_option("--eps", fit.eps, "duality-gap tolerance (default 1e-6 * p)");
  fit_cmd->add_option("--max-sweeps", fit.max_sweeps, "sweep limit")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--count", fit.count, "grid size for --auto");
  fit_cmd->add_option("--ratio", fit.ratio, "smallest/largest lambda for --auto");
  fit_cmd->add_flag("--strict", fit.strict, "exit 3 when the fit does not converge");
  fit_cmd->add_option("--out", fit.out, "output directory");

  SelectOptions sel;
  CLI::App* sel_cmd = app.add_subcommand("select", "BIC regularization path");
  add_input_options(sel_cmd, sel.in);
  sel_cmd->add_option("--eps", sel.eps, "duality-gap tolerance (default 1e-6 * p)");
  sel_cmd->add_option("--max-sweeps", sel.max_sweeps, "sweep limit")->check(CLI::PositiveNumber);
  sel_cmd->add_option("--count", sel.count, "grid size");
  sel_cmd->add_option("--ratio", sel.ratio, "smallest/largest lambda");
  sel_cmd->add_flag("--cold", sel.cold, "fit each lambda independently (parallel)");
  sel_cmd->add_option("--jobs", sel.jobs, "threads for --cold")->check(CLI::PositiveNumber);
  sel_cmd->add_option("--out", sel.out, "output directory");

  SimulateOptions simo;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo replication grid");
  sim_cmd->add_option("config", simo.config, "experiment config JSON")->required();
  sim_cmd->add_option("--out", simo.out, "output directory");
  sim_cmd->add_option("--jobs", simo.jobs, "parallel replications")->check(CLI::PositiveNumber);

  BacktestOptions bt;
  CLI::App* bt_cmd = app.add_subcommand("backtest", "rolling max-Sharpe backtest over OHLC data");
  bt_cmd->add_option("ohlc", bt.ohlc, "CSV with date,ticker,open,high,low,close")->required();
  bt_cmd->add_option("--strategies", bt.strategies, "comma list: 1/N,close,high,low,mid,interval")
      ->delimiter(',');
  bt_cmd->add_option("--est-window", bt.est_window, "estimation window in trading days")
      ->check(CLI::PositiveNumber);
  bt_cmd->add_option("--hold", bt.hold, "holding period in trading days")->check(CLI::PositiveNumber);
  bt_cmd->add_option("--span", bt.spans, "out-of-sample span(s) in trading days, comma list")->delimiter(',');
  bt_cmd->add_option("--mu-source", bt.mu_source, "expected returns from 'strategy' or 'close'");
  bt_cmd->add_option("--count", bt.count, "lambda grid size");
  bt_cmd->add_option("--ratio", bt.ratio, "smallest/largest lambda");
  bt_cmd->add_option("--jobs", bt.jobs, "strategies run in parallel")->check(CLI::PositiveNumber);
  bt_cmd->add_option("--out", bt.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }
  verbosity = verbose;

  try {
    if (*fit_cmd) {
      if (!fit.autoselect && lambda_opt->count() == 0) throw InputError("fit needs --lambda or --auto");
      return cmd_fit(fit);
    }
    if (*sel_cmd) return cmd_select(sel);
    if (*sim_cmd) return cmd_simulate(simo);
    if (*bt_cmd) return cmd_backtest(bt);
  } catch (const NotConverged& e) {
    std::cerr << "igl: " << e.what() << '\n';
    return kNotConverged;
  } catch (const InputError& e) {
    std::cerr << "igl: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "igl: " << e.what() << '\n';
    return kFailure;
  }
  return kInputError;
}

}  // namespace igl::cli
