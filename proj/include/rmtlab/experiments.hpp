// SPDX-License-Identifier: Apache-2.0
#pragma once

// Monte Carlo pipelines shared by the CLI and the acceptance suite, and the
// run() orchestrator that writes tables and the summary.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rmtlab/config.hpp"

namespace rmtlab {

// ---------------------------------------------------------------------------
// Pipelines

/// P_n(z, eta) = (1/2) sum log(lambda_i^2 + eta^2) per trial and point
/// (log|det(X - z)| at eta = 0, by LU; Cholesky of the shifted Gram matrix
/// otherwise). values[trial][point]; failed trials have empty rows.
struct PointSeries {
  std::vector<cplx> points;
  std::vector<std::vector<double>> values;
  std::size_t failed = 0;

  /// Column of one point over the successful trials.
  std::vector<double> column(std::size_t point) const;
};

PointSeries sample_log_charpoly(const EnsembleSpec& spec, const std::vector<cplx>& points, double eta,
                                std::size_t trials, std::uint64_t seed, int workers = 1);

struct FieldMaxTrial {
  std::uint64_t trial;
  std::vector<ScanResult> scans;  // one per mesh
  bool ok = true;
};

/// Maximum of the centered field (P-scale) per trial on each mesh. At eta = 0
/// one eigendecomposition per trial serves every mesh.
std::vector<FieldMaxTrial> field_max_trials(const EnsembleSpec& spec, const std::vector<Mesh>& meshes,
                                            double eta, std::size_t trials, std::uint64_t seed,
                                            int workers = 1);

// ---------------------------------------------------------------------------
// Output

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Shortest round-trip decimal for doubles; NaN/inf as "nan", "inf", "-inf".
std::string format_number(double x);
std::string to_csv(const Table& t);
nlohmann::ordered_json to_json(const Table& t);

struct Statistic {
  std::string name;
  double value;
  double stderr_ = std::numeric_limits<double>::quiet_NaN();
  std::size_t count = 0;
};

struct RunSummary {
  nlohmann::ordered_json config;
  std::vector<Statistic> stats;
  std::size_t trials_included = 0;
  std::size_t trials_excluded = 0;
  double wall_seconds = 0.0;
  bool failure_budget_exceeded = false;
  std::vector<std::pair<std::string, Table>> tables;  // file stem -> table

  nlohmann::ordered_json to_json() const;  // excludes wall-clock time
};

/// Dispatches on config.kind. Writes nothing.
RunSummary execute(const ExperimentConfig& config);

/// execute() plus files in config.output.dir: one table file per stem
/// (<stem>.csv or <stem>.json), summary.json and timing.json.
RunSummary run(const ExperimentConfig& config);

}  // namespace rmtlab
