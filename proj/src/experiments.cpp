// SPDX-License-Identifier: Apache-2.0
#include "rmtlab/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "rmtlab/density.hpp"
#include "rmtlab/linalg.hpp"
#include "rmtlab/mde.hpp"
#include "rmtlab/parallel.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/stats.hpp"
#include "rmtlab/two_resolvent.hpp"

namespace rmtlab {

using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Pipelines

std::vector<double> PointSeries::column(std::size_t point) const {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& row : values)
    if (!row.empty()) out.push_back(row.at(point));
  return out;
}

PointSeries sample_log_charpoly(const EnsembleSpec& spec, const std::vector<cplx>& points, double eta,
                                std::size_t trials, std::uint64_t seed, int workers) {
  spec.validate();
  if (!(eta >= 0.0)) throw InvalidArgument("eta", "must be >= 0");
  PointSeries out;
  out.points = points;
  out.values.assign(trials, {});
  std::vector<char> failed(trials, 0);
  for_each_trial(trials, workers, [&](std::size_t k) {
    try {
      const MatrixSample x = sample(spec, seed, k);
      std::vector<double> row(points.size());
      for (std::size_t p = 0; p < points.size(); ++p) {
        row[p] = eta == 0.0 ? linalg::log_abs_det_shift(x, points[p])
                            : 0.5 * linalg::logdet_gram_shift(x, points[p], eta);
        if (!std::isfinite(row[p])) throw NumericalFailure("singular shift");
      }
      out.values[k] = std::move(row);
    } catch (const Error&) {
      failed[k] = 1;
    }
  });
  for (char f : failed) out.failed += f;
  return out;
}

std::vector<FieldMaxTrial> field_max_trials(const EnsembleSpec& spec, const std::vector<Mesh>& meshes,
                                            double eta, std::size_t trials, std::uint64_t seed, int workers) {
  spec.validate();
  std::vector<FieldMaxTrial> out(trials);
  for_each_trial(trials, workers, [&](std::size_t k) {
    FieldMaxTrial& r = out[k];
    r.trial = k;
    try {
      const MatrixSample x = sample(spec, seed, k);
      if (eta == 0.0) {
        const std::vector<cplx> eig = linalg::eigenvalues(x);
        for (const Mesh& m : meshes) r.scans.push_back(scan_max(field_from_eigenvalues(eig, m, spec.n, spec.cls)));
      } else {
        for (const Mesh& m : meshes) r.scans.push_back(scan_max(evaluate_field(x, m, eta, spec.cls)));
      }
      for (const auto& s : r.scans)
        if (!std::isfinite(s.max)) throw NumericalFailure("non-finite field maximum");
    } catch (const Error&) {
      r.ok = false;
      r.scans.clear();
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Output

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += t.columns[i];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>) out += format_number(v);
            else if constexpr (std::is_same_v<V, std::int64_t>) out += std::to_string(v);
            else out += v;
          },
          row[i]);
    }
    out += '\n';
  }
  return out;
}

ordered_json to_json(const Table& t) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : t.rows) {
    ordered_json r = ordered_json::array();
    for (const auto& c : row) std::visit([&](const auto& v) { r.push_back(v); }, c);
    rows.push_back(std::move(r));
  }
  return {{"columns", t.columns}, {"rows", rows}};
}

ordered_json RunSummary::to_json() const {
  ordered_json stats_json = ordered_json::array();
  for (const auto& s : stats) {
    ordered_json e;
    e["name"] = s.name;
    e["value"] = s.value;
    e["stderr"] = s.stderr_;
    e["count"] = s.count;
    stats_json.push_back(std::move(e));
  }
  ordered_json j;
  j["config"] = config;
  j["trials"] = {{"configured", trials_included + trials_excluded},
                 {"included", trials_included},
                 {"excluded", trials_excluded}};
  j["failure_budget_exceeded"] = failure_budget_exceeded;
  j["statistics"] = stats_json;
  return j;
}

namespace {

using I64 = std::int64_t;

Statistic stat(std::string name, double value, std::size_t count, double se = std::numeric_limits<double>::quiet_NaN()) {
  return {std::move(name), value, se, count};
}

void add_mean(RunSummary& s, const std::string& name, const std::vector<double>& x) {
  if (x.empty()) {
    s.stats.push_back(stat(name, std::numeric_limits<double>::quiet_NaN(), 0));
    return;
  }
  const double se = x.size() > 1 ? std::sqrt(variance(x) / x.size()) : std::numeric_limits<double>::quiet_NaN();
  s.stats.push_back(stat(name, mean(x), x.size(), se));
}

void add_variance(RunSummary& s, const std::string& name, const std::vector<double>& x) {
  if (x.size() < 2) {
    s.stats.push_back(stat(name, std::numeric_limits<double>::quiet_NaN(), x.size()));
    return;
  }
  const Estimate e = empirical_variance(x);
  s.stats.push_back(stat(name, e.value, e.count, e.stderr_));
}

std::string idx(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

void run_mde(const ExperimentConfig& c, RunSummary& s) {
  Table t{{"trial", "re_z", "im_z", "re_w", "im_w", "re_m", "im_m", "residual"}, {}};
  const auto& p = c.mde;
  std::vector<double> residuals;
  for (std::size_t k = 0; k < c.trials; ++k) {
    const CounterRng rng(c.seed, k, Stream::synthetic);
    const auto [u1, u2] = rng.uniform_pair(0);
    const auto [v1, v2] = rng.uniform_pair(1);
    const cplx z = std::polar(p.z_max * std::sqrt(u1), 2.0 * std::numbers::pi * u2);
    const cplx w((2.0 * v1 - 1.0) * p.w_re_max, p.eta_min * std::pow(p.eta_max / p.eta_min, v2));
    try {
      const MdeSolution sol = solve_mde(z, w);
      residuals.push_back(sol.residual);
      t.rows.push_back({I64(k), z.real(), z.imag(), w.real(), w.imag(), sol.m.real(), sol.m.imag(), sol.residual});
    } catch (const SolverFailure&) {
      ++s.trials_excluded;
    }
  }
  s.trials_included = residuals.size();
  s.stats.push_back(stat("max_residual", residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end()),
                         residuals.size()));
  s.tables.emplace_back("mde", std::move(t));
}

void run_density(const ExperimentConfig& c, RunSummary& s) {
  const auto& p = c.density;
  const DensityProfile prof = build_density(p.z, p.grid_size);
  Table t{{"x", "rho"}, {}};
  double defect = 0.0;
  for (std::size_t k = 0; k < prof.grid.size(); ++k) {
    t.rows.push_back({prof.grid[k], prof.rho[k]});
    defect = std::max(defect, std::abs(prof.rho[k] - prof.rho[prof.grid.size() - 1 - k]));
  }
  s.tables.emplace_back("density", std::move(t));
  s.stats.push_back(stat("edge", prof.edge, prof.grid.size()));
  s.stats.push_back(stat("mass", prof.mass(), prof.grid.size()));
  s.stats.push_back(stat("trapezoid_mass", prof.trapezoid_mass(), prof.grid.size()));
  s.stats.push_back(stat("symmetry_defect", defect, prof.grid.size()));
  s.stats.push_back(stat("phi", phi(p.z), 1));
  if (p.quantiles > 0) {
    Table q{{"i", "gamma"}, {}};
    const auto g = quantiles(prof, p.quantiles);
    for (std::size_t i = 0; i < g.size(); ++i) q.rows.push_back({I64(i + 1), g[i]});
    s.tables.emplace_back("quantiles", std::move(q));
  }
}

void run_kernels(const ExperimentConfig& c, RunSummary& s) {
  const auto& p = c.kernels;
  Table t{{"trial", "re_z", "im_z", "eta", "closed_re", "closed_im", "operator_re", "operator_im", "abs_diff"}, {}};
  double worst = 0.0;
  for (std::size_t k = 0; k < c.trials; ++k) {
    const CounterRng rng(c.seed, k, Stream::synthetic);
    const auto [u1, u2] = rng.uniform_pair(0);
    const auto [v1, v2] = rng.uniform_pair(1);
    (void)v2;
    const cplx z = std::polar(p.z_max * std::sqrt(u1), 2.0 * std::numbers::pi * u2);
    const double eta = p.eta_min * std::pow(p.eta_max / p.eta_min, v1);
    try {
      const cplx closed = cov_rate_conjugate_closed_form(z, eta, p.c);
      const cplx op = cov_rate(z, std::conj(z), eta, eta, p.c);
      const double d = std::abs(closed - op);
      worst = std::max(worst, d);
      ++s.trials_included;
      t.rows.push_back({I64(k), z.real(), z.imag(), eta, closed.real(), closed.imag(), op.real(), op.imag(), d});
    } catch (const Error&) {
      ++s.trials_excluded;
    }
  }
  s.stats.push_back(stat("max_abs_diff", worst, s.trials_included));
  s.tables.emplace_back("kernels", std::move(t));
}

void run_field_max(const ExperimentConfig& c, RunSummary& s) {
  const int n = c.ensemble.n;
  const Mesh mesh = build_mesh(c.mesh_kind, c.mesh, n);
  const auto res = field_max_trials(c.ensemble, {mesh}, c.field_max.eta, c.trials, c.seed, c.workers);
  Table t{{"trial", "max", "re_argmax", "im_argmax", "max_over_log_n"}, {}};
  std::vector<double> maxima;
  const double ln = std::log(static_cast<double>(n));
  for (const auto& r : res) {
    if (!r.ok) {
      ++s.trials_excluded;
      continue;
    }
    const ScanResult& m = r.scans.front();
    maxima.push_back(m.max);
    t.rows.push_back({I64(r.trial), m.max, m.argmax.real(), m.argmax.imag(), m.max / ln});
  }
  s.trials_included = maxima.size();
  add_mean(s, "mean_max", maxima);
  std::vector<double> scaled(maxima);
  for (double& v : scaled) v /= ln;
  add_mean(s, "mean_max_over_log_n", scaled);
  s.stats.push_back(stat("mesh_points", static_cast<double>(mesh.points.size()), mesh.points.size()));
  s.tables.emplace_back("field_max", std::move(t));
}

void run_cov(const ExperimentConfig& c, RunSummary& s) {
  std::vector<cplx> points;
  std::vector<std::pair<std::size_t, std::size_t>> index;
  auto slot = [&](cplx z) {
    for (std::size_t i = 0; i < points.size(); ++i)
      if (points[i] == z) return i;
    points.push_back(z);
    return points.size() - 1;
  };
  for (const auto& [a, b] : c.cov.pairs) {
    const std::size_t ia = slot(a);
    const std::size_t ib = slot(b);
    index.emplace_back(ia, ib);
  }
  const PointSeries ps = sample_log_charpoly(c.ensemble, points, c.cov.eta, c.trials, c.seed, c.workers);
  Table t{{"trial", "point", "re_z", "im_z", "p_n"}, {}};
  for (std::size_t k = 0; k < ps.values.size(); ++k)
    for (std::size_t p = 0; p < ps.values[k].size(); ++p)
      t.rows.push_back({I64(k), I64(p), points[p].real(), points[p].imag(), ps.values[k][p]});
  s.trials_excluded = ps.failed;
  s.trials_included = c.trials - ps.failed;
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto x = ps.column(index[i].first);
    const auto y = ps.column(index[i].second);
    if (x.size() >= 2) {
      const Estimate e = empirical_covariance(x, y);
      s.stats.push_back(stat(idx("cov", i), e.value, e.count, e.stderr_));
    } else {
      s.stats.push_back(stat(idx("cov", i), std::numeric_limits<double>::quiet_NaN(), x.size()));
    }
    const auto& [a, b] = c.cov.pairs[i];
    s.stats.push_back(stat(idx("kernel", i), kernel_K(a, b, c.ensemble.n, c.ensemble.cls), 1));
  }
  s.tables.emplace_back("cov_samples", std::move(t));
}

void run_clt(const ExperimentConfig& c, RunSummary& s) {
  const int n = c.ensemble.n;
  const double eta = c.clt.eta > 0.0 ? c.clt.eta : std::pow(static_cast<double>(n), -c.clt.eta_exponent);
  const DensityProfile prof = build_density(c.clt.z, 64);
  const double I = log_potential(prof, eta);
  const CltMoments mom = clt_moments(c.clt.z, eta, c.ensemble.cls);
  const PointSeries ps = sample_log_charpoly(c.ensemble, {c.clt.z}, eta, c.trials, c.seed, c.workers);
  Table t{{"trial", "centered"}, {}};
  std::vector<double> x;
  for (std::size_t k = 0; k < ps.values.size(); ++k) {
    if (ps.values[k].empty()) continue;
    const double v = ps.values[k][0] - 0.5 * n * I - 0.5 * mom.mean_shift;
    x.push_back(v);
    t.rows.push_back({I64(k), v});
  }
  s.trials_excluded = ps.failed;
  s.trials_included = x.size();
  s.stats.push_back(stat("eta", eta, 1));
  add_mean(s, "mean", x);
  add_variance(s, "variance", x);
  s.stats.push_back(stat("predicted_variance", mom.variance / 4.0, 1));
  if (x.size() >= 100) {
    const KsResult ks = normality_test(x, 0.0, mom.variance / 4.0);
    s.stats.push_back(stat("ks_statistic", ks.statistic, ks.count));
    s.stats.push_back(stat("ks_p_value", ks.p_value, ks.count));
  }
  s.tables.emplace_back("clt", std::move(t));
}

void run_dbm(const ExperimentConfig& c, RunSummary& s) {
  const auto& p = c.dbm;
  const WindowCase wc = c.ensemble.cls == SymmetryClass::real ? WindowCase::real : WindowCase::complex;
  const int n = c.ensemble.n;
  const WindowDecomposition w = p.mode == "ratio" ? ratio_window(p.z_list.front(), p.eta_end, p.ratio, n, wc)
                                                  : window_times(p.exponents, p.K, n, wc);
  const IncrementRecord rec = p.surrogate ? gaussian_surrogate(w, p.z_list, c.trials, c.seed)
                                          : measure_increments(c.ensemble, p.z_list, w, c.trials, c.seed, c.workers);
  Table t{{"trial", "window", "re_z", "im_z", "increment", "surrogate_variance"}, {}};
  const std::size_t nz = p.z_list.size();
  const std::size_t nw = w.windows.size();
  std::vector<std::vector<double>> inc(nw * nz), model(nw * nz);
  for (std::size_t r = 0; r < rec.rows.size(); ++r) {
    const IncrementRow& row = rec.rows[r];
    const std::size_t pidx = r % nz;
    t.rows.push_back({I64(row.trial), I64(row.window), row.z.real(), row.z.imag(), row.increment, row.surrogate_variance});
    inc[row.window * nz + pidx].push_back(row.increment);
    model[row.window * nz + pidx].push_back(row.surrogate_variance);
  }
  s.trials_excluded = rec.failed_trials;
  s.trials_included = rec.trials - rec.failed_trials;
  s.stats.push_back(stat("flow_time", w.t_b, 1));
  for (std::size_t j = 0; j < nw; ++j)
    for (std::size_t q = 0; q < nz; ++q) {
      const std::string tag = "[w=" + std::to_string(j) + ",z=" + std::to_string(q) + "]";
      add_variance(s, "variance" + tag, inc[j * nz + q]);
      add_mean(s, "mean" + tag, inc[j * nz + q]);
      add_mean(s, "model_variance" + tag, model[j * nz + q]);
    }
  s.tables.emplace_back("increments", std::move(t));
}

void run_brw(const ExperimentConfig& c, RunSummary& s) {
  const auto& p = c.brw;
  BrwSpec spec;
  if (p.model == "homogeneous") {
    spec = homogeneous_spec(p.L);
  } else if (p.model == "two-regime") {
    spec = two_regime_spec(p.L, p.alpha);
  } else {
    spec.L = p.L;
    spec.regimes = p.regimes;
    spec.leaf_count = p.leaf_count;
  }
  const ExtremeStats st = simulate_field(spec, c.trials, c.seed, p.thresholds, c.workers);
  Table t{{"trial", "max"}, {}};
  for (std::size_t k = 0; k < p.thresholds.size(); ++k) t.columns.push_back(idx("xi", k));
  for (std::size_t k = 0; k < st.maxima.size(); ++k) {
    std::vector<Cell> row{I64(k), st.maxima[k]};
    for (auto v : st.xi[k]) row.push_back(static_cast<I64>(v));
    t.rows.push_back(std::move(row));
  }
  s.trials_included = st.maxima.size();
  add_mean(s, "mean_max", st.maxima);
  std::vector<double> scaled(st.maxima);
  for (double& v : scaled) v /= std::numbers::sqrt2 * p.L;
  add_mean(s, "mean_max_over_sqrt2_L", scaled);
  s.stats.push_back(stat("leaf_count", static_cast<double>(spec.leaf_count), 1));
  for (std::size_t k = 0; k < p.thresholds.size(); ++k) {
    s.stats.push_back(stat(idx("mean_xi", k), st.mean_xi(k), st.xi.size()));
    s.stats.push_back(stat(idx("mean_xi_sq", k), st.mean_xi_sq(k), st.xi.size()));
    s.stats.push_back(stat(idx("paley_zygmund", k), st.paley_zygmund(k, p.theta), st.xi.size()));
  }
  s.tables.emplace_back("brw", std::move(t));
}

void run_sv_tail(const ExperimentConfig& c, RunSummary& s) {
  const auto x = smallest_sv_samples(c.ensemble, c.sv_tail.z, c.trials, c.seed, c.workers);
  Table raw{{"trial", "n_lambda1"}, {}};
  for (std::size_t k = 0; k < x.size(); ++k) raw.rows.push_back({I64(k), x[k]});
  Table t{{"s", "hits", "trials", "frequency", "ci_low", "ci_high"}, {}};
  // no samples, no frequencies
  for (const TailRow& r : x.empty() ? std::vector<TailRow>{} : tail_table(x, c.sv_tail.s_grid)) {
    t.rows.push_back({r.s, I64(r.hits), I64(r.trials), r.frequency, r.ci_low, r.ci_high});
    s.stats.push_back(stat("frequency[s=" + format_number(r.s) + "]", r.frequency, r.trials));
  }
  s.trials_included = x.size();
  s.tables.emplace_back("sv_tail", std::move(t));
  s.tables.emplace_back("sv_samples", std::move(raw));
}

}  // namespace

RunSummary execute(const ExperimentConfig& config) {
  config.validate();
  linalg::pin_blas_threads();
  RunSummary s;
  s.config = config.echo();
  const auto t0 = std::chrono::steady_clock::now();
  switch (config.kind) {
    case ExperimentKind::mde: run_mde(config, s); break;
    case ExperimentKind::density: run_density(config, s); break;
    case ExperimentKind::kernels: run_kernels(config, s); break;
    case ExperimentKind::field_max: run_field_max(config, s); break;
    case ExperimentKind::cov: run_cov(config, s); break;
    case ExperimentKind::clt: run_clt(config, s); break;
    case ExperimentKind::dbm_var: run_dbm(config, s); break;
    case ExperimentKind::brw: run_brw(config, s); break;
    case ExperimentKind::sv_tail: run_sv_tail(config, s); break;
  }
  s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::size_t total = s.trials_included + s.trials_excluded;
  s.failure_budget_exceeded =
      total > 0 && static_cast<double>(s.trials_excluded) > config.output.max_failure_fraction * total;
  return s;
}

RunSummary run(const ExperimentConfig& config) {
  RunSummary s = execute(config);
  namespace fs = std::filesystem;
  const fs::path dir(config.output.dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InvalidArgument("output.dir", "cannot create " + dir.string() + ": " + ec.message());
  auto write = [&](const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("output.dir", "cannot write " + path.string());
    out << text;
  };
  for (const auto& [stem, table] : s.tables) {
    if (config.output.format == OutputFormat::csv) write(dir / (stem + ".csv"), to_csv(table));
    else write(dir / (stem + ".json"), to_json(table).dump(1) + "\n");
  }
  write(dir / "summary.json", s.to_json().dump(2) + "\n");
  ordered_json timing{{"kind", to_string(config.kind)}, {"wall_seconds", s.wall_seconds}};
  write(dir / "timing.json", timing.dump(2) + "\n");
  return s;
}

}  // namespace rmtlab
