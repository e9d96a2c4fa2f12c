#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pvmincq/mincq.hpp"
#include "pvmincq/sample.hpp"

namespace pvmincq {

/// Candidate hyperparameters. Which lists are used depends on the procedure:
///   pv_validate      mus x epsilons x gammas
///   kfold_validate   mus x gammas
///   reverse_validate mus x gammas x neighbors
/// Cells are enumerated with the first list varying slowest.
struct HyperGrid {
  std::vector<double> mus;
  std::vector<double> epsilons;
  std::vector<double> gammas;
  std::vector<std::size_t> neighbors{1};
  std::size_t k_folds = 5;
};

struct GridCell {
  double mu = std::numeric_limits<double>::quiet_NaN();
  double eps = std::numeric_limits<double>::quiet_NaN();
  double gamma = std::numeric_limits<double>::quiet_NaN();
  std::size_t neighbors = 0;
};

struct CellResult {
  GridCell cell;
  std::vector<double> fold_risks;
  double source_risk = std::numeric_limits<double>::quiet_NaN();
  double pv = 0.0;
  double criterion = std::numeric_limits<double>::quiet_NaN();
  bool feasible = false;
  std::string note;   ///< why an infeasible cell was skipped
};

struct ValidationReport {
  std::string procedure;
  std::vector<CellResult> cells;
  std::optional<std::size_t> chosen;

  const CellResult& best() const { return cells.at(chosen.value()); }
};

class ValidationFailed : public std::runtime_error {
 public:
  explicit ValidationFailed(ValidationReport report)
      : std::runtime_error("no feasible hyperparameter cell"), report_(std::move(report)) {}
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

/// Fold id in [0, k) for every point, stratified by label: each class is
/// shuffled with the seed and dealt round-robin.
std::vector<std::size_t> stratified_folds(std::span<const Label> labels, std::size_t k, std::uint64_t seed);

/// Sample quantiles (linear interpolation) of all source-target distances.
std::vector<double> distance_quantiles(const PointMatrix& source, const PointMatrix& target,
                                       std::span<const double> probabilities);

/// mu in {1e-4, 1e-3, 1e-2, 1e-1}, gamma in {0.1, 0.5, 1, 2, 5}, eps at the
/// 5/10/25/50 % distance quantiles, k in {1, 3, 5, 7}, five folds.
HyperGrid default_grid(const PointMatrix& source, const PointMatrix& target);

struct PvValidationOptions {
  /// Match the training folds only (true) or the whole source sample (false)
  /// when self-labeling inside a fold. The criterion always uses the PV of
  /// the full source sample.
  bool reduced_source_matching = true;
  SolverOptions solver;
};

/// Criterion: mean held-out source risk of PV-MinCq + PV(S, T, eps).
ValidationReport pv_validate(const LabeledSample& source, const UnlabeledSample& target, const HyperGrid& grid,
                             std::uint64_t seed, const PvValidationOptions& options = {});

/// Plain k-fold cross-validation of source-only MinCq; epsilons are ignored.
ValidationReport kfold_validate(const LabeledSample& source, const HyperGrid& grid, std::uint64_t seed,
                                const SolverOptions& solver = {});

using SelfLabeler =
    std::function<LabeledSample(const LabeledSample& source, const UnlabeledSample& target, const GridCell& cell)>;

/// k-NN self-labeling with k taken from the cell.
SelfLabeler nn_labeler();

/// Reverse validation: vote on the self-labeled target, relabel T with it,
/// learn a reverse vote on that, score the reverse vote on the held-out fold.
ValidationReport reverse_validate(const LabeledSample& source, const UnlabeledSample& target,
                                  const HyperGrid& grid, const SelfLabeler& labeler, std::uint64_t seed,
                                  const SolverOptions& solver = {});

/// Lowest criterion among feasible cells, ties to the lowest index.
std::optional<std::size_t> choose_cell(const std::vector<CellResult>& cells);

}  // namespace pvmincq
