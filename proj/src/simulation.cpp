#include "igl/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "igl/csv.hpp"
#include "igl/errors.hpp"
#include "igl/model_selection.hpp"
#include "igl/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace igl::sim {

using Eigen::Index;

std::string to_string(Structure s) {
  switch (s) {
    case Structure::band: return "band";
    case Structure::ar1: return "ar1";
    case Structure::erdos_renyi: return "erdos_renyi";
  }
  return "?";
}

std::string to_string(TruthMode m) { return m == TruthMode::scaled ? "scaled" : "base"; }

std::string to_string(DgpKind k) {
  switch (k) {
    case DgpKind::dgp1: return "dgp1";
    case DgpKind::dgp2: return "dgp2";
    case DgpKind::dgp3: return "dgp3";
  }
  return "?";
}

std::string to_string(RadiusDist d) {
  switch (d) {
    case RadiusDist::gamma: return "gamma";
    case RadiusDist::lognormal: return "lognormal";
    case RadiusDist::beta_scaled: return "beta";
    case RadiusDist::exponential: return "exponential";
  }
  return "?";
}

Structure parse_structure(const std::string& s) {
  if (s == "band") return Structure::band;
  if (s == "ar1") return Structure::ar1;
  if (s == "erdos_renyi" || s == "er") return Structure::erdos_renyi;
  throw InvalidConfig("unknown structure '" + s + "'");
}

TruthMode parse_truth_mode(const std::string& s) {
  if (s == "scaled") return TruthMode::scaled;
  if (s == "base") return TruthMode::base;
  throw InvalidConfig("unknown truth_mode '" + s + "'");
}

DgpKind parse_dgp(const std::string& s) {
  if (s == "dgp1") return DgpKind::dgp1;
  if (s == "dgp2") return DgpKind::dgp2;
  if (s == "dgp3") return DgpKind::dgp3;
  throw InvalidConfig("unknown dgp '" + s + "'");
}

RadiusDist parse_radius_dist(const std::string& s) {
  if (s == "gamma") return RadiusDist::gamma;
  if (s == "lognormal") return RadiusDist::lognormal;
  if (s == "beta" || s == "beta_scaled") return RadiusDist::beta_scaled;
  if (s == "exponential") return RadiusDist::exponential;
  throw InvalidConfig("unknown radius distribution '" + s + "'");
}

Matrix make_structure(const StructureSpec& spec, std::uint64_t seed) {
  const Index p = spec.p;
  if (p < 2) throw InvalidConfig("structure dimension must be >= 2");
  Matrix theta = Matrix::Zero(p, p);
  switch (spec.kind) {
    case Structure::band:
      for (Index i = 0; i < p; ++i) {
        theta(i, i) = 1.0;
        if (i + 1 < p) theta(i, i + 1) = theta(i + 1, i) = spec.band_first;
        if (i + 2 < p) theta(i, i + 2) = theta(i + 2, i) = spec.band_second;
      }
      break;
    case Structure::ar1:
      for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < p; ++i) {
          theta(i, j) = std::pow(spec.ar_rho, static_cast<double>(std::abs(i - j)));
        }
      }
      break;
    case Structure::erdos_renyi: {
      auto eng = rng::make_engine(seed);
      std::bernoulli_distribution edge(spec.er_edge_prob);
      for (Index i = 0; i < p; ++i) {
        for (Index j = i + 1; j < p; ++j) {
          if (edge(eng)) theta(i, j) = theta(j, i) = spec.er_edge_value;
        }
      }
      break;
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(theta, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues()(0);
  if (min_eig < spec.pd_floor) theta.diagonal().array() += spec.pd_floor - min_eig;
  return theta;
}

SigmaSpec make_sigma(const Matrix& theta0, std::uint64_t seed, TruthMode mode,
                     const Vector* d_override) {
  const Index p = theta0.rows();
  SigmaSpec out;
  out.theta0 = theta0;
  if (d_override != nullptr) {
    if (d_override->size() != p) throw ShapeMismatch("D override has the wrong length");
    out.d_diag = *d_override;
  } else {
    auto eng = rng::make_engine(seed);
    std::uniform_real_distribution<double> unif(1.0, 10.0);
    out.d_diag.resize(p);
    for (Index i = 0; i < p; ++i) out.d_diag(i) = unif(eng);
  }
  const Vector d_half = out.d_diag.cwiseSqrt();
  const Matrix base_cov = spd_inverse(theta0);
  out.sigma = d_half.asDiagonal() * base_cov * d_half.asDiagonal();
  symmetrize(out.sigma);
  if (mode == TruthMode::scaled) {
    const Vector d_inv_half = d_half.cwiseInverse();
    out.theta_true = d_inv_half.asDiagonal() * theta0 * d_inv_half.asDiagonal();
    symmetrize(out.theta_true);
  } else {
    out.theta_true = theta0;
  }
  return out;
}

Matrix sample_latent(Index n, const Matrix& sigma, std::uint64_t seed) {
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) throw FactorizationFailure("sigma is not positive definite");
  const Index p = sigma.rows();
  auto eng = rng::make_engine(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) g(i, j) = gauss(eng);
  }
  return g * llt.matrixL().transpose();
}

std::vector<double> draw_radii(RadiusDist dist, std::size_t count, std::uint64_t seed) {
  auto eng = rng::make_engine(seed);
  std::vector<double> r(count);
  switch (dist) {
    case RadiusDist::gamma: {
      std::gamma_distribution<double> g(1.5, 0.5);
      for (auto& v : r) v = g(eng);
      break;
    }
    case RadiusDist::lognormal: {
      std::lognormal_distribution<double> g(0.0, 0.6);
      for (auto& v : r) v = g(eng);
      break;
    }
    case RadiusDist::beta_scaled: {
      std::gamma_distribution<double> g(0.5, 1.0);
      for (auto& v : r) {
        const double a = g(eng);
        const double b = g(eng);
        v = 3.0 * a / (a + b);
      }
      break;
    }
    case RadiusDist::exponential: {
      std::exponential_distribution<double> g(0.5);
      for (auto& v : r) v = g(eng);
      break;
    }
  }
  return r;
}

IntervalMatrix make_intervals(const Matrix& z, const DGPConfig& dgp) {
  Matrix lower = z;
  Matrix upper = z;
  switch (dgp.kind) {
    case DgpKind::dgp1:
      if (!(dgp.width > 0.0)) throw InvalidConfig("DGP width must be positive");
      upper.array() += dgp.width;
      break;
    case DgpKind::dgp2:
      if (!(dgp.width > 0.0)) throw InvalidConfig("DGP width must be positive");
      lower.array() -= 0.5 * dgp.width;
      upper.array() += 0.5 * dgp.width;
      break;
    case DgpKind::dgp3: {
      const Index n = z.rows();
      const Index p = z.cols();
      if (dgp.per_cell_radii) {
        const auto r = draw_radii(dgp.radius_dist, static_cast<std::size_t>(n * p), dgp.seed);
        for (Index i = 0; i < n; ++i) {
          for (Index j = 0; j < p; ++j) {
            const double ri = r[static_cast<std::size_t>(i * p + j)];
            lower(i, j) -= ri;
            upper(i, j) += ri;
          }
        }
      } else {
        const auto r = draw_radii(dgp.radius_dist, static_cast<std::size_t>(n), dgp.seed);
        for (Index i = 0; i < n; ++i) {
          lower.row(i).array() -= r[static_cast<std::size_t>(i)];
          upper.row(i).array() += r[static_cast<std::size_t>(i)];
        }
      }
      break;
    }
  }
  return validate_intervals(std::move(lower), std::move(upper));
}

ErrorReport error_metrics(const Matrix& theta_hat, const Matrix& theta_true, double zero_tol) {
  if (theta_hat.rows() != theta_true.rows() || theta_hat.cols() != theta_true.cols() ||
      theta_hat.rows() != theta_hat.cols()) {
    throw ShapeMismatch("error_metrics: shapes differ");
  }
  Matrix delta = theta_hat - theta_true;
  symmetrize(delta);
  ErrorReport rep;
  Eigen::SelfAdjointEigenSolver<Matrix> es(delta, Eigen::EigenvaluesOnly);
  rep.spectral = es.eigenvalues().cwiseAbs().maxCoeff();
  rep.l1_elementwise = delta.cwiseAbs().sum();
  rep.frobenius = delta.norm();

  long true_nz = 0;
  long true_zero = 0;
  long tp = 0;
  long fp = 0;
  const Index p = theta_hat.rows();
  for (Index j = 0; j < p; ++j) {
    for (Index i = j + 1; i < p; ++i) {
      const bool truth = std::abs(theta_true(i, j)) > zero_tol;
      const bool est = std::abs(theta_hat(i, j)) > zero_tol;
      if (truth) {
        ++true_nz;
        if (est) ++tp;
      } else {
        ++true_zero;
        if (est) ++fp;
      }
    }
  }
  rep.support_tpr = true_nz > 0 ? static_cast<double>(tp) / static_cast<double>(true_nz) : 1.0;
  rep.support_fpr = true_zero > 0 ? static_cast<double>(fp) / static_cast<double>(true_zero) : 0.0;
  return rep;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.reps < 1) throw InvalidConfig("reps must be >= 1");
  if (cfg.structures.empty()) throw InvalidConfig("no structures given");
  if (cfg.dgps.empty()) throw InvalidConfig("no DGPs given");
  if (cfg.ns.empty()) throw InvalidConfig("no sample sizes given");
  if (cfg.ps.empty() && cfg.ratios.empty()) throw InvalidConfig("no dimensions or ratios given");
  for (Index n : cfg.ns) {
    if (n < 2) throw InvalidConfig("sample sizes must be >= 2");
  }
  for (Index p : cfg.ps) {
    if (p < 2) throw InvalidConfig("dimensions must be >= 2");
  }
  for (double r : cfg.ratios) {
    if (!(r > 0.0)) throw InvalidConfig("p/n ratios must be positive");
  }
  const bool has_width_dgp =
      std::any_of(cfg.dgps.begin(), cfg.dgps.end(), [](DgpKind k) { return k != DgpKind::dgp3; });
  const bool has_dgp3 =
      std::any_of(cfg.dgps.begin(), cfg.dgps.end(), [](DgpKind k) { return k == DgpKind::dgp3; });
  if (has_width_dgp && cfg.widths.empty()) throw InvalidConfig("DGP1/DGP2 need widths");
  for (double c : cfg.widths) {
    if (!(c > 0.0)) throw InvalidConfig("widths must be positive");
  }
  if (has_dgp3 && cfg.radius_dists.empty()) throw InvalidConfig("DGP3 needs radius distributions");
  if (cfg.grid_count < 2) throw InvalidConfig("grid_count must be >= 2");
  if (!(cfg.grid_ratio > 0.0 && cfg.grid_ratio < 1.0)) throw InvalidConfig("grid_ratio must be in (0, 1)");
}

std::string dist_label(const CellKey& key) {
  if (key.dist) return to_string(*key.dist);
  return "C=" + csv::number(key.width);
}

std::vector<CellKey> enumerate_cells(const ExperimentConfig& cfg) {
  std::vector<CellKey> cells;
  for (Structure s : cfg.structures) {
    for (DgpKind d : cfg.dgps) {
      std::vector<std::pair<std::optional<RadiusDist>, double>> variants;
      if (d == DgpKind::dgp3) {
        for (RadiusDist r : cfg.radius_dists) variants.emplace_back(r, 0.0);
      } else {
        for (double c : cfg.widths) variants.emplace_back(std::nullopt, c);
      }
      for (const auto& [dist, width] : variants) {
        for (Index n : cfg.ns) {
          std::vector<Index> ps = cfg.ps;
          if (ps.empty()) {
            for (double r : cfg.ratios) ps.push_back(static_cast<Index>(std::llround(r * static_cast<double>(n))));
          }
          for (Index p : ps) cells.push_back(CellKey{s, d, dist, width, n, p});
        }
      }
    }
  }
  return cells;
}

ReplicationRow run_one(const ExperimentConfig& cfg, const CellKey& cell, int rep) {
  const auto s_key = static_cast<std::uint64_t>(cell.structure);
  const auto n_key = static_cast<std::uint64_t>(cell.n);
  const auto p_key = static_cast<std::uint64_t>(cell.p);
  const auto r_key = static_cast<std::uint64_t>(rep);
  const std::uint64_t rep_seed = rng::derive(cfg.master_seed, "replication", {s_key, n_key, p_key, r_key});

  StructureSpec spec = cfg.structure_params;
  spec.kind = cell.structure;
  spec.p = cell.p;
  const Matrix theta0 = make_structure(spec, rng::derive(rep_seed, "structure"));
  const SigmaSpec sig = make_sigma(theta0, rng::derive(rep_seed, "scaling"), cfg.truth_mode);
  const Matrix z = sample_latent(cell.n, sig.sigma, rng::derive(rep_seed, "latent"));

  DGPConfig dgp;
  dgp.kind = cell.dgp;
  dgp.width = cell.width;
  dgp.per_cell_radii = cfg.per_cell_radii;
  if (cell.dist) {
    dgp.radius_dist = *cell.dist;
    dgp.seed = rng::derive(rep_seed, "radius", {static_cast<std::uint64_t>(*cell.dist)});
  }
  const IntervalMatrix x = make_intervals(z, dgp);
  const CovariancePair cov = bound_covariances(x);
  const LambdaGrid grid = lambda_grid(cov.pooled, cfg.grid_count, cfg.grid_ratio);
  const PathResult path = select_lambda(cov, grid.values, cov.n, cfg.solver, PathOptions{true, cfg.zero_tol});

  ReplicationRow row;
  row.cell = cell;
  row.rep = rep;
  row.lambda_selected = path.grid[static_cast<std::size_t>(path.selected_index)];
  row.errors = error_metrics(path.selected().theta_hat, sig.theta_true, cfg.zero_tol);
  return row;
}

ReplicationResult run_replications(const ExperimentConfig& cfg, int jobs) {
  validate(cfg);
  const std::vector<CellKey> cells = enumerate_cells(cfg);
  const auto reps = static_cast<std::size_t>(cfg.reps);
  const auto total = static_cast<long>(cells.size() * reps);

  std::vector<std::optional<ReplicationRow>> rows(static_cast<std::size_t>(total));
  std::vector<std::string> errors(static_cast<std::size_t>(total));
  auto job = [&](long k) {
    const std::size_t idx = static_cast<std::size_t>(k);
    const CellKey& cell = cells[idx / reps];
    const int rep = static_cast<int>(idx % reps);
    try {
      rows[idx] = run_one(cfg, cell, rep);
    } catch (const std::exception& ex) {
      errors[idx] = ex.what();
      if (errors[idx].empty()) errors[idx] = "unknown failure";
    }
  };

  if (jobs > 1) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
    for (long k = 0; k < total; ++k) job(k);
  } else {
    for (long k = 0; k < total; ++k) job(k);
  }

  ReplicationResult out;
  for (long k = 0; k < total; ++k) {
    const std::size_t idx = static_cast<std::size_t>(k);
    if (rows[idx]) {
      out.rows.push_back(std::move(*rows[idx]));
    } else {
      out.failures.push_back(CellFailure{cells[idx / reps], static_cast<int>(idx % reps), errors[idx]});
    }
  }
  return out;
}

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

double metric_value(const ReplicationRow& row, const std::string& metric) {
  if (metric == "spectral") return row.errors.spectral;
  if (metric == "l1") return row.errors.l1_elementwise;
  if (metric == "fro") return row.errors.frobenius;
  if (metric == "tpr") return row.errors.support_tpr;
  if (metric == "fpr") return row.errors.support_fpr;
  if (metric == "lambda") return row.lambda_selected;
  throw InvalidConfig("unknown metric '" + metric + "'");
}

namespace {

bool same_cell(const CellKey& a, const CellKey& b) {
  return a.structure == b.structure && a.dgp == b.dgp && a.dist == b.dist && a.width == b.width &&
         a.n == b.n && a.p == b.p;
}

}  // namespace

std::vector<std::pair<CellKey, MetricSummary>> summarize_cells(const ExperimentConfig& cfg,
                                                               const ReplicationResult& result,
                                                               const std::string& metric) {
  std::vector<std::pair<CellKey, MetricSummary>> out;
  for (const CellKey& cell : enumerate_cells(cfg)) {
    std::vector<double> vals;
    for (const auto& row : result.rows) {
      if (same_cell(row.cell, cell)) vals.push_back(metric_value(row, metric));
    }
    if (!vals.empty()) out.emplace_back(cell, summarize(vals));
  }
  return out;
}

std::string long_csv(const ReplicationResult& result) {
  std::string out = csv::format_row({"structure", "dgp", "dist", "n", "p", "C", "rep", "spectral", "l1",
                                     "fro", "tpr", "fpr", "lambda_selected"});
  for (const auto& r : result.rows) {
    out += csv::format_row({to_string(r.cell.structure), to_string(r.cell.dgp),
                            r.cell.dist ? to_string(*r.cell.dist) : "", std::to_string(r.cell.n),
                            std::to_string(r.cell.p), r.cell.dist ? "" : csv::number(r.cell.width),
                            std::to_string(r.rep), csv::number(r.errors.spectral),
                            csv::number(r.errors.l1_elementwise), csv::number(r.errors.frobenius),
                            csv::number(r.errors.support_tpr), csv::number(r.errors.support_fpr),
                            csv::number(r.lambda_selected)});
  }
  return out;
}

std::string tables_csv(const ExperimentConfig& cfg, const ReplicationResult& result) {
  std::set<Index> all_p;
  for (const CellKey& c : enumerate_cells(cfg)) all_p.insert(c.p);
  csv::Row header{"structure", "dgp", "n", "metric", "row"};
  for (Index p : all_p) header.push_back("p=" + std::to_string(p));
  std::string out = csv::format_row(header);

  char buf[64];
  for (const char* metric : {"spectral", "l1", "fro"}) {
    const auto summaries = summarize_cells(cfg, result, metric);
    // Group rows of the table by (structure, dgp, n, radius/width label).
    std::vector<std::pair<csv::Row, std::map<Index, MetricSummary>>> table;
    for (const auto& [cell, s] : summaries) {
      csv::Row key{to_string(cell.structure), to_string(cell.dgp), std::to_string(cell.n), metric,
                   dist_label(cell)};
      auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == key; });
      if (it == table.end()) {
        table.emplace_back(key, std::map<Index, MetricSummary>{});
        it = std::prev(table.end());
      }
      it->second[cell.p] = s;
    }
    for (const auto& [key, by_p] : table) {
      csv::Row row = key;
      for (Index p : all_p) {
        auto it = by_p.find(p);
        if (it == by_p.end()) {
          row.emplace_back();
        } else {
          std::snprintf(buf, sizeof(buf), "%.3f (%.3f)", it->second.mean, it->second.sd);
          row.emplace_back(buf);
        }
      }
      out += csv::format_row(row);
    }
  }
  return out;
}

std::string failures_csv(const ReplicationResult& result) {
  std::string out = csv::format_row({"structure", "dgp", "dist", "n", "p", "C", "rep", "error"});
  for (const auto& f : result.failures) {
    out += csv::format_row({to_string(f.cell.structure), to_string(f.cell.dgp),
                            f.cell.dist ? to_string(*f.cell.dist) : "", std::to_string(f.cell.n),
                            std::to_string(f.cell.p), f.cell.dist ? "" : csv::number(f.cell.width),
                            std::to_string(f.rep), f.message});
  }
  return out;
}

}  // namespace igl::sim
