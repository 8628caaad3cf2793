#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "igl/backtest.hpp"
#include "igl/model_selection.hpp"
#include "igl/simulation.hpp"

namespace igl::io {

using Json = nlohmann::ordered_json;

/// Row-major flattening of a matrix.
Json matrix_to_json(const Matrix& m);
/// Inverse of matrix_to_json; throws InputError on a size mismatch.
Matrix matrix_from_json(const Json& values, Eigen::Index rows, Eigen::Index cols);

/// {lambda, gap, sweeps, converged, objective, p, theta, sigma}; theta and
/// sigma are dense row-major arrays of length p*p.
Json fit_to_json(const IGLFit& fit);
/// Reads back the fields written by fit_to_json.
IGLFit fit_from_json(const Json& j);

Json kkt_to_json(const KKTReport& r);
Json bounds_to_json(const EigenBoundsCheck& b);

/// lambda,bic,k,gap,sweeps,selected columns.
std::string path_csv(const PathResult& path);
Json path_to_json(const PathResult& path);

/// Experiment config schema (all keys optional except where noted):
///   structures: ["band"|"ar1"|"erdos_renyi"], dgps: ["dgp1"|"dgp2"|"dgp3"],
///   radius_dists: ["gamma"|"lognormal"|"beta"|"exponential"], widths: [C...],
///   n: [..] (required), ratios: [..] or p: [..], reps, master_seed,
///   truth_mode: "scaled"|"base", grid_count, grid_ratio, epsilon, max_sweeps,
///   er_edge_prob, er_edge_value, pd_floor, zero_tol, per_cell_radii.
/// Throws InvalidConfig.
sim::ExperimentConfig experiment_from_json(const Json& j);
Json experiment_to_json(const sim::ExperimentConfig& cfg);

Json backtest_to_json(const backtest::BacktestReport& report, const backtest::PerformanceSummary& perf);
/// One row per window: rebalance_date, hold_first_date, lambda, carried, then one weight per ticker.
std::string weights_csv(const backtest::BacktestReport& report, const backtest::OhlcPanel& panel);

struct Horizon {
  std::string label;
  std::vector<std::pair<backtest::Strategy, backtest::PerformanceSummary>> results;
};

/// model, then <label>_sharpe,<label>_return,<label>_vol for each horizon.
std::string comparison_csv(const std::vector<Horizon>& horizons);

/// 64-bit FNV-1a of the compact dump, as 16 hex digits.
std::string config_hash(const Json& config);

/// {tool, version, subcommand, config_hash, master_seed, config}.
Json manifest(const std::string& subcommand, const Json& config, std::uint64_t master_seed);

inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace igl::io
