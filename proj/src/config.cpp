// SPDX-License-Identifier: Apache-2.0
#include "rmtlab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace rmtlab {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::mde: return "mde";
    case ExperimentKind::density: return "density";
    case ExperimentKind::kernels: return "kernels";
    case ExperimentKind::field_max: return "field-max";
    case ExperimentKind::cov: return "cov";
    case ExperimentKind::clt: return "clt";
    case ExperimentKind::dbm_var: return "dbm-var";
    case ExperimentKind::brw: return "brw";
    case ExperimentKind::sv_tail: return "sv-tail";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(std::string_view s) {
  for (auto k : {ExperimentKind::mde, ExperimentKind::density, ExperimentKind::kernels,
                 ExperimentKind::field_max, ExperimentKind::cov, ExperimentKind::clt,
                 ExperimentKind::dbm_var, ExperimentKind::brw, ExperimentKind::sv_tail})
    if (to_string(k) == s) return k;
  throw InvalidArgument("kind", "unknown experiment kind '" + std::string(s) + "'");
}

namespace {

// Reads keys of one JSON object and rejects the ones nobody asked for.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw InvalidArgument(path_.empty() ? "<root>" : path_, "must be an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <class T>
  void get(const std::string& key, T& dst) {
    if (const json* v = find(key)) dst = convert<T>(*v, field(key));
  }

  Reader sub(const std::string& key) {
    const json* v = find(key);
    static const json empty = json::object();
    return Reader(v ? *v : empty, field(key));
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw InvalidArgument(field(it.key()), "unknown key");
  }

  template <class T>
  static T convert(const json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw InvalidArgument(where, "expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw InvalidArgument(where, "expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_same_v<T, cplx>) {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw InvalidArgument(where, "expected [re, im]");
      return {v[0].get<double>(), v[1].get<double>()};
    } else if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw InvalidArgument(where, "expected a number");
      const double x = v.get<double>();
      if (!std::isfinite(x)) throw InvalidArgument(where, "must be finite");
      return x;
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw InvalidArgument(where, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned()) return static_cast<T>(v.get<std::uint64_t>());
        if (v.get<std::int64_t>() < 0) throw InvalidArgument(where, "must be nonnegative");
      }
      return static_cast<T>(v.get<std::int64_t>());
    } else {
      // vectors
      using E = typename T::value_type;
      if (!v.is_array()) throw InvalidArgument(where, "expected an array");
      T out;
      for (std::size_t i = 0; i < v.size(); ++i) out.push_back(convert<E>(v[i], where + "[" + std::to_string(i) + "]"));
      return out;
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

ordered_json cj(cplx z) { return ordered_json::array({z.real(), z.imag()}); }

void check(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw InvalidArgument(field, what);
}

}  // namespace

void ExperimentConfig::validate() const {
  check(trials <= (std::size_t{1} << 40), "trials", "too large");
  check(workers >= 0, "workers", "must be >= 0");
  check(output.max_failure_fraction >= 0.0 && output.max_failure_fraction <= 1.0,
        "output.max_failure_fraction", "must lie in [0, 1]");
  check(!output.dir.empty(), "output.dir", "must not be empty");

  const bool needs_matrices = kind == ExperimentKind::field_max || kind == ExperimentKind::cov ||
                              kind == ExperimentKind::clt || kind == ExperimentKind::sv_tail ||
                              (kind == ExperimentKind::dbm_var && !dbm.surrogate);
  if (needs_matrices) {
    try {
      ensemble.validate();
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("ensemble." + e.field(), e.what());
    }
  }

  switch (kind) {
    case ExperimentKind::mde:
      check(mde.z_max > 0.0, "params.z_max", "must be positive");
      check(mde.w_re_max >= 0.0, "params.w_re_max", "must be >= 0");
      check(mde.eta_min > 0.0 && mde.eta_max >= mde.eta_min, "params.eta_min", "need 0 < eta_min <= eta_max");
      break;
    case ExperimentKind::density:
      check(std::abs(density.z) <= 0.99, "params.z", "|z| must be <= 0.99");
      check(density.grid_size >= 64, "params.grid_size", "must be >= 64");
      check(density.quantiles >= 0, "params.quantiles", "must be >= 0");
      break;
    case ExperimentKind::kernels:
      check(kernels.z_max > 0.0 && kernels.z_max < 1.0, "params.z_max", "must lie in (0, 1)");
      check(kernels.eta_min > 0.0 && kernels.eta_max >= kernels.eta_min, "params.eta_min", "need 0 < eta_min <= eta_max");
      check(kernels.c > 0.0 && kernels.c <= 1.1, "params.c", "must lie in (0, 1.1]");
      break;
    case ExperimentKind::field_max:
      check(field_max.eta >= 0.0, "params.eta", "must be >= 0");
      break;
    case ExperimentKind::cov:
      check(!cov.pairs.empty(), "params.pairs", "need at least one pair");
      check(cov.eta >= 0.0, "params.eta", "must be >= 0");
      break;
    case ExperimentKind::clt:
      check(std::abs(clt.z) < 1.0, "params.z", "must lie inside the unit disc");
      check(clt.eta >= 0.0 && clt.eta < 1.0, "params.eta", "must lie in [0, 1)");
      check(clt.eta_exponent > 0.0 && clt.eta_exponent < 1.0, "params.eta_exponent", "must lie in (0, 1)");
      break;
    case ExperimentKind::dbm_var:
      check(!dbm.z_list.empty(), "params.z_list", "need at least one point");
      check(dbm.mode == "ratio" || dbm.mode == "windows", "params.mode", "expected ratio|windows");
      check(dbm.eta_end > 0.0, "params.eta_end", "must be positive");
      check(dbm.ratio > 1.0, "params.ratio", "must exceed 1");
      check(dbm.K >= 1, "params.K", "must be >= 1");
      break;
    case ExperimentKind::brw:
      check(brw.L > 0.0, "params.L", "must be positive");
      check(brw.model == "homogeneous" || brw.model == "two-regime" || brw.model == "custom", "params.model",
            "expected homogeneous|two-regime|custom");
      check(brw.theta >= 0.0 && brw.theta <= 1.0, "params.theta", "must lie in [0, 1]");
      break;
    case ExperimentKind::sv_tail:
      check(!sv_tail.s_grid.empty(), "params.s_grid", "must not be empty");
      for (double s : sv_tail.s_grid) check(s >= 0.01 && s <= 1.0, "params.s_grid", "entries must lie in [0.01, 1]");
      break;
  }
}

ordered_json ExperimentConfig::echo() const {
  ordered_json j;
  j["schema"] = kConfigSchema;
  j["kind"] = to_string(kind);
  j["seed"] = seed;
  j["trials"] = trials;
  j["ensemble"] = {{"class", to_string(ensemble.cls)},
                   {"law", to_string(ensemble.law)},
                   {"n", ensemble.n},
                   {"gaussian_component", ensemble.gaussian_component},
                   {"ginibre_component", ensemble.ginibre_component},
                   {"custom_p", ensemble.custom_p}};
  j["mesh"] = {{"kind", to_string(mesh_kind)},   {"center", cj(mesh.center)},
               {"radius", mesh.radius},          {"alpha", mesh.alpha},
               {"half_width", mesh.half_width},  {"count", mesh.count},
               {"eps1", mesh.eps1}};
  ordered_json p = ordered_json::object();
  switch (kind) {
    case ExperimentKind::mde:
      p = {{"z_max", mde.z_max}, {"w_re_max", mde.w_re_max}, {"eta_min", mde.eta_min}, {"eta_max", mde.eta_max}};
      break;
    case ExperimentKind::density:
      p = {{"z", cj(density.z)}, {"grid_size", density.grid_size}, {"quantiles", density.quantiles}};
      break;
    case ExperimentKind::kernels:
      p = {{"z_max", kernels.z_max}, {"eta_min", kernels.eta_min}, {"eta_max", kernels.eta_max}, {"c", kernels.c}};
      break;
    case ExperimentKind::field_max:
      p = {{"eta", field_max.eta}};
      break;
    case ExperimentKind::cov: {
      ordered_json pairs = ordered_json::array();
      for (const auto& [a, b] : cov.pairs) pairs.push_back(ordered_json::array({cj(a), cj(b)}));
      p = {{"pairs", pairs}, {"eta", cov.eta}};
      break;
    }
    case ExperimentKind::clt:
      p = {{"z", cj(clt.z)}, {"eta", clt.eta}, {"eta_exponent", clt.eta_exponent}};
      break;
    case ExperimentKind::dbm_var: {
      ordered_json zs = ordered_json::array();
      for (cplx z : dbm.z_list) zs.push_back(cj(z));
      p = {{"z_list", zs},
           {"mode", dbm.mode},
           {"eta_end", dbm.eta_end},
           {"ratio", dbm.ratio},
           {"K", dbm.K},
           {"a", dbm.exponents.a},
           {"b", dbm.exponents.b},
           {"c", dbm.exponents.c},
           {"alpha", dbm.exponents.alpha},
           {"surrogate", dbm.surrogate}};
      break;
    }
    case ExperimentKind::brw: {
      ordered_json regs = ordered_json::array();
      for (const auto& r : brw.regimes)
        regs.push_back({{"span", r.span}, {"rate", r.rate}, {"branching", r.branching}});
      p = {{"L", brw.L},           {"model", brw.model},           {"alpha", brw.alpha},
           {"regimes", regs},      {"leaf_count", brw.leaf_count}, {"thresholds", brw.thresholds},
           {"theta", brw.theta}};
      break;
    }
    case ExperimentKind::sv_tail:
      p = {{"z", cj(sv_tail.z)}, {"s_grid", sv_tail.s_grid}};
      break;
  }
  j["params"] = p;
  j["output"] = {{"format", output.format == OutputFormat::csv ? "csv" : "json"},
                 {"max_failure_fraction", output.max_failure_fraction}};
  return j;
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.ensemble.n = 64;
  switch (kind) {
    case ExperimentKind::mde: c.trials = 1000; break;
    case ExperimentKind::density: c.trials = 0; break;
    case ExperimentKind::kernels: c.trials = 1000; break;
    case ExperimentKind::field_max:
      c.trials = 20;
      c.mesh.radius = 0.8;
      c.mesh.count = 256;
      break;
    case ExperimentKind::cov: c.trials = 200; break;
    case ExperimentKind::clt: c.trials = 200; break;
    case ExperimentKind::dbm_var:
      c.trials = 50;
      c.ensemble.n = 256;
      break;
    case ExperimentKind::brw: c.trials = 50; break;
    case ExperimentKind::sv_tail: c.trials = 500; break;
  }
  return c;
}

ExperimentConfig parse_config(const json& doc) {
  Reader root(doc, "");
  std::string schema;
  root.get("schema", schema);
  if (schema != kConfigSchema)
    throw InvalidArgument("schema", "expected \"" + std::string(kConfigSchema) + "\"");
  std::string kind_name;
  root.get("kind", kind_name);
  if (kind_name.empty()) throw InvalidArgument("kind", "required");
  ExperimentConfig c = default_config(parse_experiment_kind(kind_name));

  root.get("seed", c.seed);
  root.get("trials", c.trials);
  root.get("workers", c.workers);

  {
    Reader e = root.sub("ensemble");
    std::string s;
    if (e.has("class")) {
      e.get("class", s);
      c.ensemble.cls = parse_symmetry_class(s);
    }
    if (e.has("law")) {
      e.get("law", s);
      c.ensemble.law = parse_base_law(s);
    }
    e.get("n", c.ensemble.n);
    e.get("gaussian_component", c.ensemble.gaussian_component);
    e.get("ginibre_component", c.ensemble.ginibre_component);
    e.get("custom_p", c.ensemble.custom_p);
    e.finish();
  }
  {
    Reader m = root.sub("mesh");
    if (m.has("kind")) {
      std::string s;
      m.get("kind", s);
      c.mesh_kind = parse_mesh_kind(s);
    }
    m.get("center", c.mesh.center);
    m.get("radius", c.mesh.radius);
    m.get("alpha", c.mesh.alpha);
    m.get("half_width", c.mesh.half_width);
    m.get("count", c.mesh.count);
    m.get("eps1", c.mesh.eps1);
    m.finish();
  }
  {
    Reader p = root.sub("params");
    switch (c.kind) {
      case ExperimentKind::mde:
        p.get("z_max", c.mde.z_max);
        p.get("w_re_max", c.mde.w_re_max);
        p.get("eta_min", c.mde.eta_min);
        p.get("eta_max", c.mde.eta_max);
        break;
      case ExperimentKind::density:
        p.get("z", c.density.z);
        p.get("grid_size", c.density.grid_size);
        p.get("quantiles", c.density.quantiles);
        break;
      case ExperimentKind::kernels:
        p.get("z_max", c.kernels.z_max);
        p.get("eta_min", c.kernels.eta_min);
        p.get("eta_max", c.kernels.eta_max);
        p.get("c", c.kernels.c);
        break;
      case ExperimentKind::field_max:
        p.get("eta", c.field_max.eta);
        break;
      case ExperimentKind::cov:
        if (const json* v = p.find("pairs")) {
          if (!v->is_array()) throw InvalidArgument("params.pairs", "expected an array");
          c.cov.pairs.clear();
          for (std::size_t i = 0; i < v->size(); ++i) {
            const auto pair = Reader::convert<std::vector<cplx>>((*v)[i], "params.pairs[" + std::to_string(i) + "]");
            if (pair.size() != 2) throw InvalidArgument("params.pairs[" + std::to_string(i) + "]", "expected two points");
            c.cov.pairs.emplace_back(pair[0], pair[1]);
          }
        }
        p.get("eta", c.cov.eta);
        break;
      case ExperimentKind::clt:
        p.get("z", c.clt.z);
        p.get("eta", c.clt.eta);
        p.get("eta_exponent", c.clt.eta_exponent);
        break;
      case ExperimentKind::dbm_var:
        p.get("z_list", c.dbm.z_list);
        p.get("mode", c.dbm.mode);
        p.get("eta_end", c.dbm.eta_end);
        p.get("ratio", c.dbm.ratio);
        p.get("K", c.dbm.K);
        p.get("a", c.dbm.exponents.a);
        p.get("b", c.dbm.exponents.b);
        p.get("c", c.dbm.exponents.c);
        p.get("alpha", c.dbm.exponents.alpha);
        p.get("surrogate", c.dbm.surrogate);
        break;
      case ExperimentKind::brw:
        p.get("L", c.brw.L);
        p.get("model", c.brw.model);
        p.get("alpha", c.brw.alpha);
        if (const json* v = p.find("regimes")) {
          if (!v->is_array()) throw InvalidArgument("params.regimes", "expected an array");
          for (std::size_t i = 0; i < v->size(); ++i) {
            Reader r((*v)[i], "params.regimes[" + std::to_string(i) + "]");
            BrwRegime reg{0.0, 0.0, 1.0};
            r.get("span", reg.span);
            r.get("rate", reg.rate);
            r.get("branching", reg.branching);
            r.finish();
            c.brw.regimes.push_back(reg);
          }
        }
        p.get("leaf_count", c.brw.leaf_count);
        p.get("thresholds", c.brw.thresholds);
        p.get("theta", c.brw.theta);
        break;
      case ExperimentKind::sv_tail:
        p.get("z", c.sv_tail.z);
        p.get("s_grid", c.sv_tail.s_grid);
        break;
    }
    p.finish();
  }
  {
    Reader o = root.sub("output");
    o.get("dir", c.output.dir);
    if (o.has("format")) {
      std::string f;
      o.get("format", f);
      if (f == "csv") c.output.format = OutputFormat::csv;
      else if (f == "json") c.output.format = OutputFormat::json;
      else throw InvalidArgument("output.format", "expected csv|json");
    }
    o.get("max_failure_fraction", c.output.max_failure_fraction);
    o.finish();
  }
  root.finish();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("config", "cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument("config", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace rmtlab
