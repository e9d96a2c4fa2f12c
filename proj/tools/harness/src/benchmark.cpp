#include "pvmincq/harness/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <numeric>
#include <thread>

#include "pvmincq/dataset.hpp"
#include "pvmincq/harness/report.hpp"
#include "pvmincq/harness/svg.hpp"
#include "pvmincq/pipeline.hpp"
#include "pvmincq/selflabel.hpp"

namespace pvmincq::harness {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finaliser over (seed, stream)
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + stream * 0xD1B54A32D192ED03ULL + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Task make_task(const BenchmarkConfig& config, const ShiftCase& shift_case, std::uint64_t seed) {
  LabeledSample source =
      generate_moons(config.source_positives, config.source_negatives, config.noise_sd, derive_seed(seed, 1));
  ShiftSpec shift = shift_case.shift;
  if (auto* rot = std::get_if<Rotation>(&shift); rot && !rot->center)
    rot->center = Eigen::Vector2d(centroid(source.points()));

  LabeledSample target_truth = apply_shift(
      generate_moons(config.target_positives, config.target_negatives, config.noise_sd, derive_seed(seed, 2)), shift);
  LabeledSample test = apply_shift(
      generate_moons(config.test_positives, config.test_negatives, config.noise_sd, derive_seed(seed, 3)), shift);
  UnlabeledSample target = target_truth.unlabeled();
  return Task{std::move(source), std::move(target_truth), std::move(target), std::move(test), std::move(shift)};
}

HyperGrid make_grid(const BenchmarkConfig& config, const LabeledSample& source, const UnlabeledSample& target,
                    Method method) {
  HyperGrid grid;
  grid.mus = config.mus;
  grid.gammas = config.gammas;
  grid.k_folds = config.folds;
  if (method == Method::pv_mincq)
    grid.epsilons = distance_quantiles(source.points(), target.points(), config.eps_quantiles);
  if (method == Method::nn_mincq) grid.neighbors = config.neighbors;
  return grid;
}

ValidationReport validate_method(const BenchmarkConfig& config, const LabeledSample& source,
                                 const UnlabeledSample& target, Method method, std::uint64_t seed) {
  const HyperGrid grid = make_grid(config, source, target, method);
  const std::uint64_t fold_seed = derive_seed(seed, 4);
  switch (method) {
    case Method::mincq:
      return kfold_validate(source, grid, fold_seed);
    case Method::nn_mincq:
      return reverse_validate(source, target, grid, nn_labeler(), fold_seed);
    case Method::pv_mincq: {
      PvValidationOptions options;
      options.reduced_source_matching = config.reduced_source_matching;
      return pv_validate(source, target, grid, fold_seed, options);
    }
  }
  throw std::logic_error("unhandled method");
}

namespace {

/// Feasible cells ordered by criterion, ties by grid index.
std::vector<std::size_t> ranked_cells(const ValidationReport& report) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < report.cells.size(); ++i)
    if (report.cells[i].feasible) idx.push_back(i);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return report.cells[a].criterion < report.cells[b].criterion;
  });
  return idx;
}

void train_final(const Task& task, Method method, const GridCell& cell, RunResult& out) {
  switch (method) {
    case Method::mincq: {
      out.vote = train_mincq(task.source, cell.gamma, cell.mu);
      out.train_size = task.source.size();
      return;
    }
    case Method::nn_mincq: {
      NnMinCqModel model = train_nn_mincq(task.source, task.target, cell.gamma, cell.mu, cell.neighbors);
      out.single_label = model.single_label;
      out.train_size = model.self_labeled.size();
      out.vote = std::move(model.vote);
      return;
    }
    case Method::pv_mincq: {
      PvMinCqModel model = train_pv_mincq(task.source, task.target, cell.gamma, cell.mu, cell.eps);
      out.train_size = model.self_labeled.size();
      out.diagnostics = diagnose(model.vote, task.source, task.target, model.matching);

      std::vector<Label> truth, transferred;
      for (const auto& p : transferred_labels(task.source, model.matching)) {
        truth.push_back(task.target_truth.label(p.target_index));
        transferred.push_back(p.transferred_label);
      }
      try {
        out.bounds = corollary_bound(model.vote.scores(model.self_labeled.points()), truth, transferred);
      } catch (const CBoundUndefined&) {
      }
      out.vote = std::move(model.vote);
      out.matching = std::move(model.matching);
      return;
    }
  }
}

}  // namespace

RunResult run_on_task(const BenchmarkConfig& config, const Task& task, Method method, const std::string& shift_name,
                      std::uint64_t seed) {
  RunResult out;
  out.method = method;
  out.shift = shift_name;
  out.seed = seed;
  try {
    out.report = validate_method(config, task.source, task.target, method, seed);
  } catch (const ValidationFailed& e) {
    out.report = e.report();
    out.error = "no feasible hyperparameter cell";
    return out;
  }

  // The chosen cell was feasible on every fold but may still fail on the
  // full sample (infeasible margin); fall back along the ranking.
  for (std::size_t idx : ranked_cells(out.report)) {
    const CellResult& cell = out.report.cells[idx];
    try {
      train_final(task, method, cell.cell, out);
    } catch (const InfeasibleMargin&) {
      ++out.fallbacks;
      continue;
    } catch (const EmptySelfLabel&) {
      ++out.fallbacks;
      continue;
    }
    out.chosen = cell.cell;
    out.criterion = cell.criterion;
    out.accuracy = accuracy(*out.vote, task.test);
    return out;
  }
  out.error = "every feasible cell failed on the full sample";
  return out;
}

RunResult run_single(const BenchmarkConfig& config, Method method, const ShiftCase& shift, std::uint64_t seed) {
  const Task task = make_task(config, shift, seed);
  return run_on_task(config, task, method, shift.name, seed);
}

std::vector<Job> benchmark_jobs(const BenchmarkConfig& config) {
  std::vector<Job> jobs;
  for (const ShiftCase& shift : config.shift_cases())
    for (Method m : config.methods)
      for (std::uint64_t seed : config.seeds()) jobs.push_back({m, shift, seed});
  return jobs;
}

const RunResult& BenchmarkSummary::run(std::size_t shift, std::size_t method, std::size_t seed) const {
  return runs.at((shift * methods.size() + method) * seeds.size() + seed);
}

std::size_t BenchmarkSummary::diagnostic_violations() const {
  std::size_t n = 0;
  for (const RunResult& r : runs)
    if (r.diagnostics && !r.diagnostics->holds()) ++n;
  return n;
}

BenchmarkSummary run_benchmark(const BenchmarkConfig& config, const Progress& progress) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::vector<Job> jobs = benchmark_jobs(config);

  BenchmarkSummary summary;
  summary.shifts = config.shift_cases();
  summary.methods = config.methods;
  summary.seeds = config.seeds();
  summary.runs.resize(jobs.size());

  std::filesystem::create_directories(config.out_dir);
  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex mutex;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      try {
        const Task task = make_task(config, job.shift, job.seed);
        RunResult result = run_on_task(config, task, job.method, job.shift.name, job.seed);
        write_file_atomically(run_json_path(config.out_dir, result), run_json(result).dump(2) + "\n");
        const bool plot = config.plots == PlotPolicy::all ||
                          (config.plots == PlotPolicy::first_seed && job.seed == config.first_seed);
        if (plot && result.vote) write_file_atomically(plot_path(config.out_dir, result), render_svg(task, result));

        std::lock_guard lock(mutex);
        summary.runs[i] = std::move(result);
        ++done;
        if (progress) {
          const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          progress(summary.runs[i], done, jobs.size(), secs);
        }
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
        return;
      }
    }
  };

  const std::size_t workers = std::min(config.jobs, jobs.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_outputs(summary, config);
  return summary;
}

}  // namespace pvmincq::harness
