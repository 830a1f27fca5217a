// SPDX-License-Identifier: Apache-2.0
#pragma once

// Experiment configuration: a versioned JSON document that fully determines
// a run. Unknown keys are rejected at every level.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmtlab/brw_extremes.hpp"
#include "rmtlab/dbm_flow.hpp"
#include "rmtlab/ensembles.hpp"
#include "rmtlab/field.hpp"

namespace rmtlab {

inline constexpr const char* kConfigSchema = "rmtlab.experiment/1";

enum class ExperimentKind { mde, density, kernels, field_max, cov, clt, dbm_var, brw, sv_tail };

std::string_view to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(std::string_view s);

enum class OutputFormat { csv, json };

struct OutputSpec {
  std::string dir = "out";
  OutputFormat format = OutputFormat::csv;
  double max_failure_fraction = 0.05;  // exit code 3 above this
};

struct MdeParams {
  double z_max = 1.5;     // |z| drawn uniformly on the disc of this radius
  double w_re_max = 3.0;  // Re w uniform in [-w_re_max, w_re_max]
  double eta_min = 1e-6;  // Im w log-uniform in [eta_min, eta_max]
  double eta_max = 10.0;
};

struct DensityParams {
  cplx z{0.0, 0.0};
  int grid_size = 256;
  int quantiles = 0;  // > 0: also emit gamma_1..gamma_q for n = q
};

struct KernelsParams {
  double z_max = 0.9;
  double eta_min = 1e-3;
  double eta_max = 1.0;
  double c = 1.0;
};

struct FieldMaxParams {
  double eta = 0.0;
};

struct CovParams {
  std::vector<std::pair<cplx, cplx>> pairs{{{0.3, 0.2}, {0.35, 0.2}}};
  double eta = 0.0;
};

struct CltParams {
  cplx z{0.3, 0.2};
  double eta = 0.0;           // > 0 overrides eta_exponent
  double eta_exponent = 0.5;  // eta = n^{-eta_exponent}
};

struct DbmParams {
  std::vector<cplx> z_list{{0.0, 0.0}};
  std::string mode = "ratio";  // ratio | windows
  double eta_end = 0.125;      // ratio mode
  double ratio = 2.718281828459045;
  int K = 4;                   // windows mode
  WindowExponents exponents;
  bool surrogate = false;      // Gaussian surrogate instead of matrices
};

struct BrwParams {
  double L = 12.0;
  std::string model = "homogeneous";  // homogeneous | two-regime | custom
  double alpha = 0.25;
  std::vector<BrwRegime> regimes;     // custom
  std::uint64_t leaf_count = 0;       // custom
  std::vector<double> thresholds;
  double theta = 0.5;
};

struct SvTailParams {
  cplx z{0.0, 0.0};
  std::vector<double> s_grid{0.05, 0.1, 0.2, 0.5, 1.0};
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::mde;
  std::uint64_t seed = 1;
  std::size_t trials = 100;
  int workers = 1;
  EnsembleSpec ensemble;
  MeshKind mesh_kind = MeshKind::disc;
  MeshParams mesh;
  OutputSpec output;

  MdeParams mde;
  DensityParams density;
  KernelsParams kernels;
  FieldMaxParams field_max;
  CovParams cov;
  CltParams clt;
  DbmParams dbm;
  BrwParams brw;
  SvTailParams sv_tail;

  void validate() const;  // throws InvalidArgument with the field path
  /// Canonical JSON of everything that affects the run (workers and output dir excluded).
  nlohmann::ordered_json echo() const;
};

/// Defaults sized for a quick run of each kind.
ExperimentConfig default_config(ExperimentKind kind);

/// Parses and validates. Missing keys keep their defaults; unknown keys throw.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

}  // namespace rmtlab
