#include "igl/report_io.hpp"

#include <cstdio>

#include "igl/csv.hpp"
#include "igl/errors.hpp"
#include "igl/rng.hpp"

namespace igl::io {

using Eigen::Index;

Json matrix_to_json(const Matrix& m) {
  Json a = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) a.push_back(m(i, j));
  }
  return a;
}

Matrix matrix_from_json(const Json& values, Index rows, Index cols) {
  if (!values.is_array() || static_cast<Index>(values.size()) != rows * cols) {
    throw InputError("matrix array has the wrong length");
  }
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = values[static_cast<std::size_t>(i * cols + j)].get<double>();
  }
  return m;
}

Json fit_to_json(const IGLFit& fit) {
  Json j;
  j["lambda"] = fit.lambda;
  j["gap"] = fit.gap;
  j["sweeps"] = fit.sweeps;
  j["converged"] = fit.converged;
  j["objective"] = fit.objective;
  j["p"] = fit.theta_hat.rows();
  j["theta"] = matrix_to_json(fit.theta_hat);
  j["sigma"] = matrix_to_json(fit.sigma_hat);
  return j;
}

IGLFit fit_from_json(const Json& j) {
  try {
    IGLFit fit;
    fit.lambda = j.at("lambda").get<double>();
    fit.gap = j.at("gap").get<double>();
    fit.sweeps = j.at("sweeps").get<int>();
    fit.converged = j.at("converged").get<bool>();
    if (j.contains("objective") && j["objective"].is_number()) fit.objective = j["objective"].get<double>();
    const Index p = j.at("p").get<Index>();
    fit.theta_hat = matrix_from_json(j.at("theta"), p, p);
    fit.sigma_hat = matrix_from_json(j.at("sigma"), p, p);
    return fit;
  } catch (const Json::exception& ex) {
    throw InputError(std::string("fit JSON: ") + ex.what());
  }
}

Json kkt_to_json(const KKTReport& r) {
  return Json{{"max_stationarity_residual", r.max_stationarity_residual},
              {"max_feasibility_excess", r.max_feasibility_excess},
              {"min_eigenvalue_theta", r.min_eigenvalue_theta},
              {"max_eigenvalue_theta", r.max_eigenvalue_theta}};
}

Json bounds_to_json(const EigenBoundsCheck& b) {
  return Json{{"lower_bound", b.lower_bound},
              {"upper_bound", b.upper_bound},
              {"max_eigenvalue_theta", b.max_eigenvalue},
              {"pass", b.pass}};
}

std::string path_csv(const PathResult& path) {
  std::string out = csv::format_row({"lambda", "bic", "k", "gap", "sweeps", "selected"});
  for (std::size_t k = 0; k < path.grid.size(); ++k) {
    const PathEntry& e = path.entries[k];
    out += csv::format_row({csv::number(path.grid[k]), e.ok ? csv::number(e.bic) : "NA",
                            std::to_string(e.k), e.ok ? csv::number(e.fit.gap) : "NA",
                            std::to_string(e.fit.sweeps),
                            static_cast<int>(k) == path.selected_index ? "1" : "0"});
  }
  return out;
}

Json path_to_json(const PathResult& path) {
  Json rows = Json::array();
  for (std::size_t k = 0; k < path.grid.size(); ++k) {
    const PathEntry& e = path.entries[k];
    Json r{{"lambda", path.grid[k]}, {"ok", e.ok}, {"k", e.k}, {"sweeps", e.fit.sweeps},
           {"converged", e.fit.converged}};
    r["bic"] = e.ok ? Json(e.bic) : Json(nullptr);
    r["gap"] = e.ok ? Json(e.fit.gap) : Json(nullptr);
    if (!e.ok) r["error"] = e.error;
    rows.push_back(std::move(r));
  }
  return Json{{"selected_index", path.selected_index},
              {"selected_lambda", path.grid[static_cast<std::size_t>(path.selected_index)]},
              {"path", rows}};
}

namespace {

template <class T, class Fn>
std::vector<T> list_of(const Json& j, const char* key, Fn&& conv, std::vector<T> fallback) {
  if (!j.contains(key)) return fallback;
  const Json& a = j[key];
  if (!a.is_array()) throw InvalidConfig(std::string("'") + key + "' must be an array");
  std::vector<T> out;
  for (const auto& v : a) out.push_back(conv(v));
  return out;
}

}  // namespace

sim::ExperimentConfig experiment_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidConfig("experiment config must be a JSON object");
  sim::ExperimentConfig cfg;
  try {
    auto str = [](const Json& v) { return v.get<std::string>(); };
    cfg.structures = list_of<sim::Structure>(j, "structures", [&](const Json& v) { return sim::parse_structure(str(v)); }, cfg.structures);
    cfg.dgps = list_of<sim::DgpKind>(j, "dgps", [&](const Json& v) { return sim::parse_dgp(str(v)); }, cfg.dgps);
    cfg.radius_dists = list_of<sim::RadiusDist>(j, "radius_dists", [&](const Json& v) { return sim::parse_radius_dist(str(v)); }, cfg.radius_dists);
    cfg.widths = list_of<double>(j, "widths", [](const Json& v) { return v.get<double>(); }, cfg.widths);
    if (!j.contains("n")) throw InvalidConfig("experiment config needs 'n'");
    cfg.ns = list_of<Index>(j, "n", [](const Json& v) { return v.get<Index>(); }, {});
    cfg.ratios = list_of<double>(j, "ratios", [](const Json& v) { return v.get<double>(); }, cfg.ratios);
    cfg.ps = list_of<Index>(j, "p", [](const Json& v) { return v.get<Index>(); }, {});
    cfg.reps = j.value("reps", cfg.reps);
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    if (j.contains("truth_mode")) cfg.truth_mode = sim::parse_truth_mode(j["truth_mode"].get<std::string>());
    cfg.grid_count = j.value("grid_count", cfg.grid_count);
    cfg.grid_ratio = j.value("grid_ratio", cfg.grid_ratio);
    cfg.solver.epsilon = j.value("epsilon", cfg.solver.epsilon);
    cfg.solver.max_sweeps = j.value("max_sweeps", cfg.solver.max_sweeps);
    cfg.structure_params.er_edge_prob = j.value("er_edge_prob", cfg.structure_params.er_edge_prob);
    cfg.structure_params.er_edge_value = j.value("er_edge_value", cfg.structure_params.er_edge_value);
    cfg.structure_params.pd_floor = j.value("pd_floor", cfg.structure_params.pd_floor);
    cfg.zero_tol = j.value("zero_tol", cfg.zero_tol);
    cfg.per_cell_radii = j.value("per_cell_radii", cfg.per_cell_radii);
  } catch (const Json::exception& ex) {
    throw InvalidConfig(std::string("experiment config: ") + ex.what());
  }
  sim::validate(cfg);
  return cfg;
}

Json experiment_to_json(const sim::ExperimentConfig& cfg) {
  Json j;
  auto names = [](const auto& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(sim::to_string(x));
    return a;
  };
  j["structures"] = names(cfg.structures);
  j["dgps"] = names(cfg.dgps);
  j["radius_dists"] = names(cfg.radius_dists);
  j["widths"] = cfg.widths;
  j["n"] = cfg.ns;
  if (cfg.ps.empty()) {
    j["ratios"] = cfg.ratios;
  } else {
    j["p"] = cfg.ps;
  }
  j["reps"] = cfg.reps;
  j["master_seed"] = cfg.master_seed;
  j["truth_mode"] = sim::to_string(cfg.truth_mode);
  j["grid_count"] = cfg.grid_count;
  j["grid_ratio"] = cfg.grid_ratio;
  j["epsilon"] = cfg.solver.epsilon;
  j["max_sweeps"] = cfg.solver.max_sweeps;
  j["er_edge_prob"] = cfg.structure_params.er_edge_prob;
  j["er_edge_value"] = cfg.structure_params.er_edge_value;
  j["pd_floor"] = cfg.structure_params.pd_floor;
  j["zero_tol"] = cfg.zero_tol;
  j["per_cell_radii"] = cfg.per_cell_radii;
  return j;
}

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json backtest_to_json(const backtest::BacktestReport& report, const backtest::PerformanceSummary& perf) {
  Json windows = Json::array();
  for (std::size_t k = 0; k < report.windows.size(); ++k) {
    const auto& w = report.windows[k];
    const auto& b = perf.blocks[k];
    Json rec{{"rebalance_date", w.rebalance_date},
             {"est_first", w.est_first},
             {"hold_first", w.hold_first},
             {"hold_last", w.hold_last},
             {"lambda", w.lambda},
             {"carried", w.carried},
             {"weights", std::vector<double>(w.weights.data(), w.weights.data() + w.weights.size())},
             {"returns", w.returns},
             {"ann_return", b.ann_return},
             {"ann_vol", b.ann_vol},
             {"sharpe", optional_number(b.sharpe)}};
    if (!w.note.empty()) rec["note"] = w.note;
    windows.push_back(std::move(rec));
  }
  return Json{{"strategy", backtest::to_string(report.strategy)},
              {"tickers", report.tickers},
              {"summary",
               {{"ann_return", perf.ann_return},
                {"ann_vol", perf.ann_vol},
                {"sharpe", finite_or_null(perf.sharpe)},
                {"sharpe_blocks", perf.sharpe_blocks},
                {"pooled",
                 {{"ann_return", perf.pooled.ann_return},
                  {"ann_vol", perf.pooled.ann_vol},
                  {"sharpe", optional_number(perf.pooled.sharpe)}}}}},
              {"windows", windows}};
}

std::string weights_csv(const backtest::BacktestReport& report, const backtest::OhlcPanel& panel) {
  csv::Row header{"rebalance_date", "hold_first_date", "lambda", "carried"};
  header.insert(header.end(), report.tickers.begin(), report.tickers.end());
  std::string out = csv::format_row(header);
  for (const auto& w : report.windows) {
    csv::Row r{w.rebalance_date, panel.dates.at(static_cast<std::size_t>(w.hold_first)), csv::number(w.lambda),
               w.carried ? "1" : "0"};
    for (Index j = 0; j < w.weights.size(); ++j) r.push_back(csv::number(w.weights(j)));
    out += csv::format_row(r);
  }
  return out;
}

std::string comparison_csv(const std::vector<Horizon>& horizons) {
  csv::Row header{"model"};
  for (const auto& h : horizons) {
    for (const char* m : {"_sharpe", "_return", "_vol"}) header.push_back(h.label + m);
  }
  std::string out = csv::format_row(header);
  if (horizons.empty()) return out;
  for (std::size_t s = 0; s < horizons.front().results.size(); ++s) {
    csv::Row r{backtest::to_string(horizons.front().results[s].first)};
    for (const auto& h : horizons) {
      const auto& perf = h.results.at(s).second;
      r.push_back(std::isfinite(perf.sharpe) ? csv::number(perf.sharpe) : "NA");
      r.push_back(csv::number(perf.ann_return));
      r.push_back(csv::number(perf.ann_vol));
    }
    out += csv::format_row(r);
  }
  return out;
}

std::string config_hash(const Json& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(rng::fnv1a(config.dump())));
  return buf;
}

Json manifest(const std::string& subcommand, const Json& config, std::uint64_t master_seed) {
  return Json{{"tool", "igl"},
              {"version", kToolVersion},
              {"subcommand", subcommand},
              {"config_hash", config_hash(config)},
              {"master_seed", master_seed},
              {"config", config}};
}

}  // namespace igl::io
