#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "igl/interval_data.hpp"
#include "igl/solver.hpp"

namespace igl::sim {

enum class Structure { band, ar1, erdos_renyi };
enum class TruthMode { scaled, base };
enum class DgpKind { dgp1, dgp2, dgp3 };
enum class RadiusDist { gamma, lognormal, beta_scaled, exponential };

std::string to_string(Structure s);
std::string to_string(TruthMode m);
std::string to_string(DgpKind k);
std::string to_string(RadiusDist d);
/// Throws InvalidConfig on unknown names.
Structure parse_structure(const std::string& s);
TruthMode parse_truth_mode(const std::string& s);
DgpKind parse_dgp(const std::string& s);
RadiusDist parse_radius_dist(const std::string& s);

struct StructureSpec {
  Structure kind = Structure::band;
  Eigen::Index p = 10;
  double band_first = 0.6;
  double band_second = 0.3;
  double ar_rho = 0.6;
  double er_edge_prob = 0.05;
  double er_edge_value = 0.6;
  double pd_floor = 0.05;
};

/// Base precision for the structure, shifted by (pd_floor - lambda_min) I
/// when its smallest eigenvalue is below pd_floor. `seed` only matters for E-R.
Matrix make_structure(const StructureSpec& spec, std::uint64_t seed);

struct SigmaSpec {
  Matrix theta0;
  Vector d_diag;
  Matrix sigma;
  Matrix theta_true;
};

/// Sigma = D^{1/2} theta0^{-1} D^{1/2} with D_ii ~ U(1, 10). `d_override`
/// replaces the draw (tests use it to force D = I). Throws SingularMatrix.
SigmaSpec make_sigma(const Matrix& theta0, std::uint64_t seed, TruthMode mode = TruthMode::scaled,
                     const Vector* d_override = nullptr);

/// n draws from N(0, sigma), one per row. Throws FactorizationFailure.
Matrix sample_latent(Eigen::Index n, const Matrix& sigma, std::uint64_t seed);

struct DGPConfig {
  DgpKind kind = DgpKind::dgp1;
  double width = 1.0;
  RadiusDist radius_dist = RadiusDist::gamma;
  std::uint64_t seed = 0;
  // One radius per cell instead of one per observation row.
  bool per_cell_radii = false;
};

/// `count` i.i.d. radii from the named distribution.
std::vector<double> draw_radii(RadiusDist dist, std::size_t count, std::uint64_t seed);

/// Turns latent points into intervals. Throws InvalidConfig for a
/// non-positive width.
IntervalMatrix make_intervals(const Matrix& z, const DGPConfig& dgp);

struct ErrorReport {
  double spectral = 0.0;
  double l1_elementwise = 0.0;
  double frobenius = 0.0;
  double support_tpr = 1.0;
  double support_fpr = 0.0;
};

/// Norms of theta_hat - theta_true and off-diagonal support recovery rates.
/// Throws ShapeMismatch.
ErrorReport error_metrics(const Matrix& theta_hat, const Matrix& theta_true,
                          double zero_tol = kDefaultZeroTol);

struct ExperimentConfig {
  std::vector<Structure> structures{Structure::ar1};
  std::vector<DgpKind> dgps{DgpKind::dgp3};
  std::vector<RadiusDist> radius_dists{RadiusDist::gamma};
  std::vector<double> widths{1.0};
  std::vector<Eigen::Index> ns{100};
  std::vector<double> ratios{1.0};
  // When non-empty, overrides ratios.
  std::vector<Eigen::Index> ps;
  int reps = 1;
  std::uint64_t master_seed = 1;
  TruthMode truth_mode = TruthMode::scaled;
  int grid_count = 50;
  double grid_ratio = 0.01;
  SolverConfig solver{};
  StructureSpec structure_params{};
  double zero_tol = kDefaultZeroTol;
  bool per_cell_radii = false;
};

/// Throws InvalidConfig.
void validate(const ExperimentConfig& cfg);

struct CellKey {
  Structure structure = Structure::band;
  DgpKind dgp = DgpKind::dgp1;
  // Radius distribution for dgp3, unset otherwise.
  std::optional<RadiusDist> dist;
  // Width for dgp1/dgp2, 0 for dgp3.
  double width = 0.0;
  Eigen::Index n = 0;
  Eigen::Index p = 0;
};

std::string dist_label(const CellKey& key);

struct ReplicationRow {
  CellKey cell;
  int rep = 0;
  ErrorReport errors;
  double lambda_selected = 0.0;
};

struct CellFailure {
  CellKey cell;
  int rep = 0;
  std::string message;
};

struct ReplicationResult {
  std::vector<ReplicationRow> rows;
  std::vector<CellFailure> failures;
};

/// Every cell of the grid in a fixed order.
std::vector<CellKey> enumerate_cells(const ExperimentConfig& cfg);

/// One replication: structure, D, latent draw, intervals, BIC path, scoring.
/// Seeds depend only on (master_seed, cell, rep). The latent draw ignores
/// the DGP, so cells differing only in DGP share Z.
ReplicationRow run_one(const ExperimentConfig& cfg, const CellKey& cell, int rep);

/// All (cell, rep) jobs. `jobs` > 1 runs them with OpenMP; rows come back in
/// (cell, rep) order either way, so output does not depend on scheduling.
ReplicationResult run_replications(const ExperimentConfig& cfg, int jobs = 1);

struct MetricSummary {
  double mean = 0.0;
  double sd = 0.0;  // sample sd, 0 for a single replication
  int count = 0;
};

MetricSummary summarize(const std::vector<double>& values);

/// Per-cell summaries of a named metric ("spectral", "l1", "fro", "tpr", "fpr",
/// "lambda"), in enumerate_cells order. Cells without rows are skipped.
std::vector<std::pair<CellKey, MetricSummary>> summarize_cells(const ExperimentConfig& cfg,
                                                               const ReplicationResult& result,
                                                               const std::string& metric);

double metric_value(const ReplicationRow& row, const std::string& metric);

/// Long-format CSV, one row per replication.
std::string long_csv(const ReplicationResult& result);
/// Table layout: one block per (structure, dgp, n, metric), rows = radius
/// distribution or width, columns = p, cells "mean (sd)".
std::string tables_csv(const ExperimentConfig& cfg, const ReplicationResult& result);
std::string failures_csv(const ReplicationResult& result);

}  // namespace igl::sim
