#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <doctest.h>

#include "pvmincq/harness/benchmark.hpp"
#include "pvmincq/harness/config.hpp"
#include "pvmincq/harness/report.hpp"
#include "pvmincq/harness/svg.hpp"

using namespace pvmincq;
using namespace pvmincq::harness;

namespace {

BenchmarkConfig small_config(const std::filesystem::path& out) {
  BenchmarkConfig c;
  c.source_positives = c.source_negatives = 20;
  c.target_positives = c.target_negatives = 20;
  c.test_positives = c.test_negatives = 50;
  c.rotations = {20};
  c.translation = Eigen::Vector2d(1.0, -0.5);
  c.seed_count = 2;
  c.mus = {1e-2};
  c.gammas = {1.0, 2.0};
  c.eps_quantiles = {0.1, 0.25};
  c.neighbors = {1, 3};
  c.folds = 3;
  c.out_dir = out;
  c.plots = PlotPolicy::none;
  return c;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::size_t field_count(const std::string& line) {
  std::size_t n = 1;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') quoted = !quoted;
    if (c == ',' && !quoted) ++n;
  }
  return n;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_SUITE("harness.config") {

TEST_CASE("rendered defaults parse back to the same configuration") {
  const BenchmarkConfig d;
  const std::string text = render_config(d);
  CHECK(render_config(parse_config(text)) == text);
  CHECK(parse_config("").shift_cases().size() == 8);
}

TEST_CASE("explicit values override defaults") {
  const BenchmarkConfig c = parse_config(
      "[shifts]\nrotations = 15 25\ntranslation = none\n[seeds]\ncount = 3\n[run]\nmethods = pv-mincq\nplots = all\n");
  CHECK(c.rotations == std::vector<double>{15, 25});
  CHECK_FALSE(c.translation.has_value());
  CHECK(c.seeds() == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(c.methods == std::vector<Method>{Method::pv_mincq});
  CHECK(c.plots == PlotPolicy::all);
  CHECK(c.shift_cases().size() == 2);
  CHECK(c.shift_cases()[0].name == "rot15");
}

TEST_CASE("unknown sections, keys and values are errors") {
  CHECK_THROWS_AS(parse_config("[nope]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[data]\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[data]\nnoise_sd = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[run]\nmethods = svm\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[grid]\nfolds = 1\n").validate(), ConfigError);
  CHECK_THROWS_AS(parse_config("[shifts]\nrotations = 0\n").validate(), ConfigError);
}

TEST_CASE("shift lookup by column name") {
  const BenchmarkConfig c;
  CHECK(find_shift(c, "rot30").name == "rot30");
  CHECK(std::holds_alternative<Translation>(find_shift(c, "trans").shift));
  CHECK(std::get<Rotation>(find_shift(c, "rot45").shift).degrees == 45.0);
  CHECK_THROWS_AS(find_shift(c, "spin"), ConfigError);
  CHECK(parse_method("nn-mincq") == Method::nn_mincq);
  CHECK(method_name(Method::pv_mincq) == "pv-mincq");
}

TEST_CASE("derived seeds separate the streams") {
  CHECK(derive_seed(1, 1) != derive_seed(1, 2));
  CHECK(derive_seed(1, 1) != derive_seed(2, 1));
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

}

TEST_SUITE("harness.benchmark") {

TEST_CASE("small benchmark writes a table-shaped CSV and per-run rows") {
  TempDir dir("pvmincq-harness-test");
  const BenchmarkConfig c = small_config(dir.path);
  const BenchmarkSummary s = run_benchmark(c);
  CHECK(s.runs.size() == 2 * 3 * 2);

  const auto table = lines_of(slurp(dir.path / "table.csv"));
  REQUIRE(table.size() == 4);
  CHECK(table[0] == "method,rot20,trans");
  CHECK(table[1].rfind("mincq,", 0) == 0);
  CHECK(table[2].rfind("nn-mincq,", 0) == 0);
  CHECK(table[3].rfind("pv-mincq,", 0) == 0);

  const auto rows = lines_of(slurp(dir.path / "per_seed.csv"));
  REQUIRE(rows.size() == 1 + s.runs.size());
  for (const auto& r : rows) CHECK(field_count(r) == 18);

  CHECK(std::filesystem::exists(dir.path / "config.ini"));
  CHECK(std::filesystem::exists(dir.path / "summary.json"));
  CHECK(std::filesystem::exists(dir.path / "runs" / "rot20" / "pv-mincq-seed1.json"));
  CHECK(s.diagnostic_violations() == 0);
}

TEST_CASE("outputs do not depend on repetition or the number of workers") {
  TempDir a("pvmincq-harness-a"), b("pvmincq-harness-b");
  BenchmarkConfig ca = small_config(a.path), cb = small_config(b.path);
  ca.rotations = {30};
  cb.rotations = {30};
  cb.jobs = 3;
  run_benchmark(ca);
  run_benchmark(cb);
  CHECK(slurp(a.path / "table.csv") == slurp(b.path / "table.csv"));
  CHECK(slurp(a.path / "per_seed.csv") == slurp(b.path / "per_seed.csv"));
  CHECK(slurp(a.path / "runs" / "rot30" / "pv-mincq-seed2.json") ==
        slurp(b.path / "runs" / "rot30" / "pv-mincq-seed2.json"));
}

TEST_CASE("a single PV-MinCq run has diagnostics, bounds and a plot") {
  const BenchmarkConfig c = small_config("unused");
  const ShiftCase shift = find_shift(c, "rot20");
  const Task task = make_task(c, shift, 1);
  const RunResult r = run_on_task(c, task, Method::pv_mincq, shift.name, 1);
  REQUIRE(r.has_accuracy());
  REQUIRE(r.matching);
  REQUIRE(r.diagnostics);
  CHECK(r.diagnostics->holds());
  CHECK(r.train_size == r.matching->size());

  const std::string svg = render_svg(task, r);
  // every arrow joins a matched pair, so no arrow is longer than eps in data units
  const PointMatrix& src = task.source.points();
  const PointMatrix& tgt = task.target.points();
  const Eigen::Vector2d lo = src.rowwise().minCoeff().cwiseMin(tgt.rowwise().minCoeff());
  const Eigen::Vector2d hi = src.rowwise().maxCoeff().cwiseMax(tgt.rowwise().maxCoeff());
  const double span = 1.16 * (hi - lo).maxCoeff();
  const double px_per_unit = SvgOptions{}.size_px / span;

  const std::regex line(R"re(<line x1="([-0-9.]+)" y1="([-0-9.]+)" x2="([-0-9.]+)" y2="([-0-9.]+)")re");
  std::size_t arrows = 0;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), line); it != std::sregex_iterator(); ++it) {
    const double dx = std::stod((*it)[3]) - std::stod((*it)[1]);
    const double dy = std::stod((*it)[4]) - std::stod((*it)[2]);
    CHECK(std::hypot(dx, dy) / px_per_unit <= r.matching->eps + 0.02 / px_per_unit);
    ++arrows;
  }
  CHECK(arrows == r.matching->size());
}

TEST_CASE("run JSON carries the chosen cell") {
  const BenchmarkConfig c = small_config("unused");
  const RunResult r = run_single(c, Method::mincq, find_shift(c, "rot20"), 2);
  const nlohmann::json j = run_json(r);
  CHECK(j.at("method") == "mincq");
  CHECK(j.at("seed") == 2);
  CHECK(j.contains("chosen"));
}

}
