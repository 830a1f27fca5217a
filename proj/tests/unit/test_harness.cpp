#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "rmtlab/config.hpp"
#include "rmtlab/experiments.hpp"

using namespace rmtlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const ExperimentKind kAllKinds[] = {ExperimentKind::mde,       ExperimentKind::density, ExperimentKind::kernels,
                                    ExperimentKind::field_max, ExperimentKind::cov,     ExperimentKind::clt,
                                    ExperimentKind::dbm_var,   ExperimentKind::brw,     ExperimentKind::sv_tail};

ExperimentConfig small(ExperimentKind k) {
  ExperimentConfig c = default_config(k);
  c.trials = std::min<std::size_t>(c.trials, 12);
  if (k == ExperimentKind::density) c.density.quantiles = 16;
  if (k == ExperimentKind::field_max) c.mesh.count = 64;
  if (k == ExperimentKind::clt) c.trials = 120;  // KS needs 100 samples
  if (k == ExperimentKind::brw) {
    c.brw.L = 6.0;
    c.brw.thresholds = {2.0, 6.0};
  }
  if (k == ExperimentKind::dbm_var) c.trials = 4;
  return c;
}

std::string fingerprint(const RunSummary& s) {
  std::string out = s.to_json().dump();
  for (const auto& [stem, table] : s.tables) out += "\n" + stem + "\n" + to_csv(table);
  return out;
}

json base(const char* kind) { return {{"schema", kConfigSchema}, {"kind", kind}}; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rmtlab_harness_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RMTLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing rejects malformed documents") {
  CHECK_NOTHROW(parse_config(base("cov")));

  auto field_of = [](const json& doc) {
    try {
      parse_config(doc);
    } catch (const InvalidArgument& e) {
      return e.field();
    }
    return std::string("<accepted>");
  };

  json doc = base("cov");
  doc["bogus"] = 1;
  CHECK(field_of(doc) == "bogus");

  doc = base("cov");
  doc["ensemble"] = {{"n", 32}, {"colour", "red"}};
  CHECK(field_of(doc) == "ensemble.colour");

  doc = base("cov");
  doc["params"] = {{"pairs", {{{0.1, 0.1}, {0.2, 0.2}}}}, {"radius", 1}};
  CHECK(field_of(doc) == "params.radius");

  doc = base("cov");
  doc["schema"] = "rmtlab.experiment/0";
  CHECK(field_of(doc) == "schema");

  doc = base("cov");
  doc.erase("kind");
  CHECK(field_of(doc) == "kind");

  doc = base("cov");
  doc["ensemble"] = {{"n", 0}};
  CHECK(field_of(doc) != "<accepted>");

  doc = base("cov");
  doc["ensemble"] = {{"class", "quaternion"}};
  CHECK(field_of(doc) != "<accepted>");

  doc = base("sv-tail");
  doc["params"] = {{"s_grid", {0.1, 2.0}}};
  CHECK(field_of(doc) != "<accepted>");

  doc = base("cov");
  doc["output"] = {{"format", "xml"}};
  CHECK(field_of(doc) == "output.format");

  doc = base("cov");
  doc["trials"] = "many";
  CHECK_THROWS(parse_config(doc));

  CHECK_THROWS_AS(parse_config(base("plot")), InvalidArgument);
}

TEST_CASE("config echo round-trips") {
  for (ExperimentKind k : kAllKinds) {
    const ExperimentConfig c = small(k);
    const auto echo = c.echo();
    CHECK(echo["schema"] == kConfigSchema);
    CHECK(echo["kind"] == std::string(to_string(k)));
    const ExperimentConfig back = parse_config(json::parse(echo.dump()));
    CHECK(back.echo() == echo);
  }
}

TEST_CASE("trials = 0 gives headers and empty samples") {
  for (ExperimentKind k : kAllKinds) {
    if (k == ExperimentKind::density) continue;  // deterministic, no trials
    ExperimentConfig c = small(k);
    c.trials = 0;
    const RunSummary s = execute(c);
    CAPTURE(to_string(k));
    CHECK(s.trials_included == 0);
    CHECK(s.trials_excluded == 0);
    CHECK_FALSE(s.failure_budget_exceeded);
    REQUIRE_FALSE(s.tables.empty());
    const Table& t = s.tables.front().second;
    CHECK_FALSE(t.columns.empty());
    CHECK(t.rows.empty());
    const std::string csv = to_csv(t);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1);
  }
}

TEST_CASE("outputs do not depend on the worker count") {
  for (ExperimentKind k : kAllKinds) {
    CAPTURE(to_string(k));
    ExperimentConfig c = small(k);
    c.workers = 1;
    const std::string one = fingerprint(execute(c));
    for (int w : {4, 8}) {
      c.workers = w;
      CHECK(fingerprint(execute(c)) == one);
    }
    c.workers = 1;
    CHECK(fingerprint(execute(c)) == one);
    c.seed += 1;
    if (k != ExperimentKind::density) CHECK(fingerprint(execute(c)) != one);
  }
}

TEST_CASE("every statistic carries its sample size") {
  for (ExperimentKind k : kAllKinds) {
    const RunSummary s = execute(small(k));
    CAPTURE(to_string(k));
    const auto j = s.to_json();
    CHECK(j["trials"]["configured"] == small(k).trials);
    for (const auto& st : j["statistics"]) CHECK(st.contains("count"));
  }
}

TEST_CASE("failed trials are excluded and counted") {
  // sparse entries make X singular at z = 0 in a fraction of trials
  json doc = base("cov");
  doc["trials"] = 200;
  doc["ensemble"] = {{"law", "custom"}, {"custom_p", 0.1}, {"n", 16}};
  doc["params"] = {{"pairs", {{{0.0, 0.0}, {0.1, 0.0}}}}};
  ExperimentConfig c = parse_config(doc);
  RunSummary s = execute(c);
  CHECK(s.trials_excluded > 0);
  CHECK(s.trials_included > 0);
  CHECK(s.trials_included + s.trials_excluded == c.trials);
  CHECK(s.failure_budget_exceeded);
  for (const auto& st : s.stats)
    if (st.name.rfind("cov", 0) == 0) CHECK(st.count == s.trials_included);

  c.output.max_failure_fraction = 1.0;
  s = execute(c);
  CHECK_FALSE(s.failure_budget_exceeded);
}

TEST_CASE("run writes tables, summary and timing") {
  ExperimentConfig c = small(ExperimentKind::brw);
  c.output.dir = scratch("files").string();
  const RunSummary s = run(c);
  const fs::path dir = c.output.dir;
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(fs::exists(dir / "timing.json"));
  for (const auto& [stem, table] : s.tables) {
    CHECK(fs::exists(dir / (stem + ".csv")));
    CHECK(slurp(dir / (stem + ".csv")) == to_csv(table));
  }
  const json summary = json::parse(slurp(dir / "summary.json"));
  CHECK(summary["config"] == c.echo());
  CHECK_FALSE(summary.contains("wall_seconds"));

  c.output.format = OutputFormat::json;
  c.output.dir = scratch("files_json").string();
  const RunSummary sj = run(c);
  for (const auto& [stem, table] : sj.tables) CHECK(json::parse(slurp(fs::path(c.output.dir) / (stem + ".json"))) == to_json(table));
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-2.5) == "-2.5");
  CHECK(format_number(1e-300) == "1e-300");
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  for (double x : {1.0 / 3.0, 2.0 / 7.0, 6.02214076e23, -1.0e-17}) CHECK(std::stod(format_number(x)) == x);
}

TEST_CASE("command line exit codes") {
  const fs::path dir = scratch("cli");
  const std::string out = " --out " + (dir / "o").string();

  CHECK(run_cli("brw --trials 3" + out) == 0);
  CHECK(fs::exists(dir / "o" / "summary.json"));
  CHECK(run_cli("mde --trials 5 --format json" + out) == 0);
  CHECK(fs::exists(dir / "o" / "mde.json"));

  auto write = [&](const std::string& name, const json& doc) {
    const fs::path p = dir / name;
    std::ofstream(p) << doc.dump();
    return p.string();
  };
  json bad = base("cov");
  bad["bogus"] = true;
  CHECK(run_cli("cov --config " + write("bad.json", bad) + out) == 2);
  CHECK(run_cli("clt --config " + write("cov.json", base("cov")) + out) == 2);
  CHECK(run_cli("cov --config " + write("broken.json", "{") + out) == 2);
  std::ofstream(dir / "syntax.json") << "{ not json";
  CHECK(run_cli("cov --config " + (dir / "syntax.json").string() + out) == 2);
  CHECK(run_cli("cov --config " + (dir / "missing.json").string() + out) == 2);
  CHECK(run_cli("cov --format xml" + out) == 2);
  CHECK(run_cli("cov --workers -1" + out) == 2);
  CHECK(run_cli("frobnicate" + out) == 2);

  json failing = base("cov");
  failing["trials"] = 20;
  failing["ensemble"] = {{"law", "custom"}, {"custom_p", 0.01}, {"n", 16}};
  failing["params"] = {{"pairs", {{{0.0, 0.0}, {0.1, 0.0}}}}};
  CHECK(run_cli("cov --config " + write("failing.json", failing) + out) == 3);
}
