#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pvmincq/diagnostics.hpp"
#include "pvmincq/harness/config.hpp"
#include "pvmincq/matching.hpp"
#include "pvmincq/metrics.hpp"
#include "pvmincq/mincq.hpp"
#include "pvmincq/validation.hpp"

namespace pvmincq::harness {

/// Samples of one adaptation task. The target's true labels are kept for
/// evaluation only; learners see `target` without them.
struct Task {
  LabeledSample source;
  LabeledSample target_truth;
  UnlabeledSample target;
  LabeledSample test;
  ShiftSpec shift;   ///< with the rotation centre resolved
};

/// Seeds for the source, target and test samples and for the fold split are
/// derived from the run seed, so every method sees the same data.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

Task make_task(const BenchmarkConfig& config, const ShiftCase& shift, std::uint64_t seed);

HyperGrid make_grid(const BenchmarkConfig& config, const LabeledSample& source, const UnlabeledSample& target,
                    Method method);

/// The method's own validation procedure over the configured grid.
ValidationReport validate_method(const BenchmarkConfig& config, const LabeledSample& source,
                                 const UnlabeledSample& target, Method method, std::uint64_t seed);

struct RunResult {
  Method method = Method::mincq;
  std::string shift;
  std::uint64_t seed = 0;

  std::optional<std::string> error;   ///< set when no model could be trained
  double accuracy = 0.0;              ///< on the test sample
  bool single_label = false;          ///< NN self-labels all coincide
  GridCell chosen;
  double criterion = 0.0;
  std::size_t fallbacks = 0;          ///< better-ranked cells that failed on the full sample
  std::size_t train_size = 0;         ///< points MinCq was trained on

  std::optional<MajorityVote> vote;
  std::optional<Matching> matching;
  std::optional<AdaptationDiagnostics> diagnostics;
  std::optional<BoundReport> bounds;  ///< on T^ with its true labels against the transferred ones
  ValidationReport report;

  /// Degenerate NN runs are reported as "no result".
  bool has_accuracy() const noexcept { return !error && !single_label; }
};

RunResult run_single(const BenchmarkConfig& config, Method method, const ShiftCase& shift, std::uint64_t seed);
RunResult run_on_task(const BenchmarkConfig& config, const Task& task, Method method, const std::string& shift_name,
                      std::uint64_t seed);

struct Job {
  Method method;
  ShiftCase shift;
  std::uint64_t seed;
};

/// Jobs in table order: shift, then method, then seed.
std::vector<Job> benchmark_jobs(const BenchmarkConfig& config);

struct BenchmarkSummary {
  std::vector<ShiftCase> shifts;
  std::vector<Method> methods;
  std::vector<std::uint64_t> seeds;
  std::vector<RunResult> runs;   ///< in benchmark_jobs order
  double seconds = 0.0;

  const RunResult& run(std::size_t shift, std::size_t method, std::size_t seed) const;
  std::size_t diagnostic_violations() const;
};

using Progress = std::function<void(const RunResult&, std::size_t done, std::size_t total, double seconds)>;

/// Runs every job on a pool of config.jobs workers and writes the results
/// under config.out_dir. Outputs do not depend on the number of workers.
BenchmarkSummary run_benchmark(const BenchmarkConfig& config, const Progress& progress = {});

}  // namespace pvmincq::harness
