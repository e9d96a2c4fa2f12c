// pvmincq: benchmark harness for MinCq, NN-MinCq and PV-MinCq on the
// rotated / translated two-moons adaptation tasks.
//
//   pvmincq bench    [--config F] [--out DIR] [--jobs N] [--seed S] [--method M]... [--shift X]...
//   pvmincq run      --method M --shift X [--seed S] [--config F] [--out DIR]
//   pvmincq pv       SOURCE.csv TARGET.csv [--eps E]... [--config F]
//   pvmincq validate --method M (--shift X [--seed S] | --source F --target F) [--config F] [--out DIR]
//
// Exit status: 0 success, 1 usage or configuration error, 2 pipeline error.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "pvmincq/dataset.hpp"
#include "pvmincq/harness/benchmark.hpp"
#include "pvmincq/harness/config.hpp"
#include "pvmincq/harness/report.hpp"
#include "pvmincq/harness/svg.hpp"
#include "pvmincq/matching.hpp"

namespace {

using namespace pvmincq;
using namespace pvmincq::harness;

constexpr int exit_usage = 1;
constexpr int exit_pipeline = 2;

struct Common {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
};

BenchmarkConfig load(const Common& common) {
  BenchmarkConfig config = common.config_path.empty() ? BenchmarkConfig{} : load_config(common.config_path);
  if (!common.out.empty())
    config.out_dir = common.out;
  else if (const char* env = std::getenv("PVMINCQ_OUT"); env && *env)
    config.out_dir = env;
  if (common.seed) config.first_seed = *common.seed;
  return config;
}

/// Restricts the configured shifts to the named ones, keeping config order.
void restrict_shifts(BenchmarkConfig& config, const std::vector<std::string>& names) {
  if (names.empty()) return;
  std::vector<double> rotations;
  bool translation = false;
  for (const std::string& name : names) {
    const ShiftCase s = find_shift(config, name);
    if (const auto* rot = std::get_if<Rotation>(&s.shift))
      rotations.push_back(rot->degrees);
    else
      translation = true;
  }
  config.rotations = rotations;
  if (!translation) config.translation.reset();
}

int cmd_bench(const Common& common, std::size_t jobs, const std::vector<std::string>& methods,
              const std::vector<std::string>& shifts, bool quiet) {
  BenchmarkConfig config = load(common);
  if (jobs) config.jobs = jobs;
  if (!methods.empty()) {
    config.methods.clear();
    for (const auto& m : methods) config.methods.push_back(parse_method(m));
  }
  restrict_shifts(config, shifts);
  config.validate();

  Progress progress;
  if (!quiet)
    progress = [](const RunResult& r, std::size_t done, std::size_t total, double secs) {
      std::string what = r.error ? "error: " + *r.error
                                 : r.single_label ? std::string("single self-label")
                                                  : fmt::format("{:.1f}%", 100.0 * r.accuracy);
      std::cerr << fmt::format("[{}/{}] {:>8} {:<8} seed {:<3} {}  ({:.0f}s)\n", done, total, method_name(r.method),
                               r.shift, r.seed, what, secs);
    };
  const BenchmarkSummary summary = run_benchmark(config, progress);
  std::cout << table_csv(summary);
  std::cerr << fmt::format("{} runs in {:.1f}s, {} diagnostic violations; results in {}\n", summary.runs.size(),
                           summary.seconds, summary.diagnostic_violations(), config.out_dir.string());
  return 0;
}

int cmd_run(const Common& common, const std::string& method_name_arg, const std::string& shift_name) {
  const BenchmarkConfig config = load(common);
  const Method method = parse_method(method_name_arg);
  const ShiftCase shift = find_shift(config, shift_name);
  const Task task = make_task(config, shift, config.first_seed);
  const RunResult result = run_on_task(config, task, method, shift.name, config.first_seed);
  if (!common.out.empty() || std::getenv("PVMINCQ_OUT")) {
    write_file_atomically(run_json_path(config.out_dir, result), run_json(result).dump(2) + "\n");
    if (result.vote) write_file_atomically(plot_path(config.out_dir, result), render_svg(task, result));
  }
  std::cout << run_json(result).dump(2) << "\n";
  return result.error ? exit_pipeline : 0;
}

PointMatrix points_of(const AnySample& s) {
  return std::visit([](const auto& sample) { return sample.points(); }, s);
}

int cmd_pv(const Common& common, const std::string& source_path, const std::string& target_path,
           const std::vector<double>& eps_list) {
  const BenchmarkConfig config = load(common);
  const PointMatrix source = points_of(read_csv(source_path));
  const PointMatrix target = points_of(read_csv(target_path));
  std::vector<double> eps = eps_list;
  if (eps.empty()) eps = distance_quantiles(source, target, config.eps_quantiles);

  nlohmann::json out = nlohmann::json::array();
  for (double e : eps) {
    const Matching m = compute_matching(source, target, e);
    out.push_back({{"eps", e}, {"pv", m.pv}, {"matched", m.size()}, {"source_size", m.source_size},
                   {"target_size", m.target_size}});
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_validate(const Common& common, const std::string& method_arg, const std::string& shift_name,
                 const std::string& source_path, const std::string& target_path) {
  const BenchmarkConfig config = load(common);
  const Method method = parse_method(method_arg);

  std::optional<LabeledSample> source;
  std::optional<UnlabeledSample> target;
  if (!source_path.empty() || !target_path.empty()) {
    if (source_path.empty() || target_path.empty())
      throw ConfigError("--source and --target must be given together");
    AnySample s = read_csv(source_path);
    if (!std::holds_alternative<LabeledSample>(s)) throw ConfigError(source_path + ": source sample needs a y column");
    source = std::get<LabeledSample>(std::move(s));
    AnySample t = read_csv(target_path);
    target = std::holds_alternative<LabeledSample>(t) ? std::get<LabeledSample>(t).unlabeled()
                                                      : std::get<UnlabeledSample>(std::move(t));
  } else {
    if (shift_name.empty()) throw ConfigError("validate needs --shift or --source/--target");
    Task task = make_task(config, find_shift(config, shift_name), config.first_seed);
    source = std::move(task.source);
    target = std::move(task.target);
  }

  ValidationReport report;
  int status = 0;
  try {
    report = validate_method(config, *source, *target, method, config.first_seed);
  } catch (const ValidationFailed& e) {
    report = e.report();
    status = exit_pipeline;
  }
  const std::string csv = validation_csv(report);
  std::cout << csv;
  if (!common.out.empty()) {
    const std::filesystem::path dir = common.out;
    write_file_atomically(dir / "validation.csv", csv);
    write_file_atomically(dir / "chosen.json", chosen_json(report).dump(2) + "\n");
  }
  if (status) std::cerr << "no feasible hyperparameter cell\n";
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MinCq / NN-MinCq / PV-MinCq benchmark harness"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "INI configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "output directory (default: $PVMINCQ_OUT or the config's run.out)");
    sub->add_option("--seed", common.seed, "seed (bench: first seed)");
  };

  std::size_t jobs = 0;
  bool quiet = false;
  std::vector<std::string> methods, shifts;
  auto* bench = app.add_subcommand("bench", "run the full benchmark table");
  add_common(bench);
  bench->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--method", methods, "restrict to these methods");
  bench->add_option("--shift", shifts, "restrict to these shifts (rot20 ... rot80, trans)");
  bench->add_flag("--quiet", quiet, "no progress lines");

  std::string method, shift;
  auto* run = app.add_subcommand("run", "one method on one shift and seed; JSON on stdout");
  add_common(run);
  run->add_option("--method", method, "mincq, nn-mincq or pv-mincq")->required();
  run->add_option("--shift", shift, "rot<degrees> or trans")->required();

  std::string source_path, target_path;
  std::vector<double> eps;
  auto* pv = app.add_subcommand("pv", "perturbed variation between two CSV samples");
  add_common(pv);
  pv->add_option("source", source_path, "source CSV")->required()->check(CLI::ExistingFile);
  pv->add_option("target", target_path, "target CSV")->required()->check(CLI::ExistingFile);
  pv->add_option("--eps", eps, "matching radius (default: the configured distance quantiles)")
      ->check(CLI::PositiveNumber);

  std::string v_method, v_shift, v_source, v_target;
  auto* validate = app.add_subcommand("validate", "hyperparameter validation report as CSV");
  add_common(validate);
  validate->add_option("--method", v_method, "mincq, nn-mincq or pv-mincq")->required();
  validate->add_option("--shift", v_shift, "generate the task for this shift");
  validate->add_option("--source", v_source, "labelled source CSV")->check(CLI::ExistingFile);
  validate->add_option("--target", v_target, "target CSV")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_usage;
  }

  try {
    if (*bench) return cmd_bench(common, jobs, methods, shifts, quiet);
    if (*run) return cmd_run(common, method, shift);
    if (*pv) return cmd_pv(common, source_path, target_path, eps);
    if (*validate) return cmd_validate(common, v_method, v_shift, v_source, v_target);
  } catch (const ConfigError& e) {
    std::cerr << "pvmincq: " << e.what() << "\n";
    return exit_usage;
  } catch (const CsvError& e) {
    std::cerr << "pvmincq: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "pvmincq: " << e.what() << "\n";
    return exit_pipeline;
  }
  return exit_usage;
}
