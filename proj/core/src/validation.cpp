#include "pvmincq/validation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <tuple>

#include "pvmincq/matching.hpp"
#include "pvmincq/metrics.hpp"
#include "pvmincq/selflabel.hpp"
#include "pvmincq/voters.hpp"

namespace pvmincq {

namespace {

void require_positive(const std::vector<double>& values, const char* what) {
  if (values.empty()) throw std::invalid_argument(std::string("hyperparameter grid: empty ") + what);
  for (double v : values)
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string("hyperparameter grid: non-positive ") + what);
}

void check_folds(const HyperGrid& grid, std::size_t m) {
  if (grid.k_folds < 2) throw std::invalid_argument("hyperparameter grid: k_folds must be at least 2");
  if (grid.k_folds > m) throw std::invalid_argument("hyperparameter grid: more folds than source points");
}

struct FoldSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> held_out;
};

std::vector<FoldSplit> make_splits(std::span<const Label> labels, std::size_t k, std::uint64_t seed) {
  const auto assignment = stratified_folds(labels, k, seed);
  std::vector<FoldSplit> splits(k);
  for (std::size_t i = 0; i < assignment.size(); ++i)
    for (std::size_t f = 0; f < k; ++f) (assignment[i] == f ? splits[f].held_out : splits[f].train).push_back(i);
  return splits;
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void mark_infeasible(CellResult& cell, const std::string& why) {
  if (cell.feasible || cell.note.empty()) cell.note = why;
  cell.feasible = false;
}

ValidationReport finish(ValidationReport report) {
  for (auto& cell : report.cells) {
    if (!cell.feasible) continue;
    cell.source_risk = mean(cell.fold_risks);
    cell.criterion = cell.source_risk + cell.pv;
  }
  report.chosen = choose_cell(report.cells);
  if (!report.chosen) throw ValidationFailed(std::move(report));
  return report;
}

// MinCq on outputs H with labels, for every mu; `eval` turns the solved
// posterior into a fold risk. Infeasible mus mark their cell.
template <typename Eval>
void sweep_mus(const OutputMoments& moments, std::span<const Label> labels, const std::vector<double>& mus,
               const SolverOptions& solver, const std::function<CellResult&(std::size_t)>& cell_of_mu,
               Eval&& eval) {
  for (std::size_t im = 0; im < mus.size(); ++im) {
    CellResult& cell = cell_of_mu(im);
    if (!cell.feasible) continue;
    try {
      const Posterior rho = solve(moments.instance(labels, mus[im]), solver);
      cell.fold_risks.push_back(eval(rho));
    } catch (const InfeasibleMargin&) {
      mark_infeasible(cell, "infeasible margin");
    }
  }
}

}  // namespace

std::vector<std::size_t> stratified_folds(std::span<const Label> labels, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw std::invalid_argument("zero folds");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> fold(labels.size());
  std::size_t dealt = 0;
  for (Label cls : {1, -1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) idx.push_back(i);
    // Fisher-Yates with an explicit draw so the order does not depend on
    // the standard library's shuffle.
    for (std::size_t i = idx.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng() % i);
      std::swap(idx[i - 1], idx[j]);
    }
    for (std::size_t i : idx) fold[i] = dealt++ % k;
  }
  return fold;
}

std::vector<double> distance_quantiles(const PointMatrix& source, const PointMatrix& target,
                                       std::span<const double> probabilities) {
  if (source.cols() == 0 || target.cols() == 0) throw SampleError("distance quantiles of an empty sample");
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(source.cols() * target.cols()));
  for (Eigen::Index s = 0; s < source.cols(); ++s)
    for (Eigen::Index t = 0; t < target.cols(); ++t) d.push_back((source.col(s) - target.col(t)).norm());
  std::sort(d.begin(), d.end());
  std::vector<double> out;
  for (double p : probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile probability outside [0, 1]");
    const double pos = p * static_cast<double>(d.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, d.size() - 1);
    out.push_back(d[lo] + (pos - static_cast<double>(lo)) * (d[hi] - d[lo]));
  }
  return out;
}

HyperGrid default_grid(const PointMatrix& source, const PointMatrix& target) {
  HyperGrid g;
  g.mus = {1e-4, 1e-3, 1e-2, 1e-1};
  g.gammas = {0.1, 0.5, 1.0, 2.0, 5.0};
  const double probs[] = {0.05, 0.10, 0.25, 0.50};
  g.epsilons = distance_quantiles(source, target, probs);
  g.neighbors = {1, 3, 5, 7};
  g.k_folds = 5;
  return g;
}

std::optional<std::size_t> choose_cell(const std::vector<CellResult>& cells) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!cells[i].feasible) continue;
    if (!best || cells[i].criterion < cells[*best].criterion) best = i;
  }
  return best;
}

// ---------------------------------------------------------------------------

ValidationReport pv_validate(const LabeledSample& source, const UnlabeledSample& target, const HyperGrid& grid,
                             std::uint64_t seed, const PvValidationOptions& options) {
  require_positive(grid.mus, "mu list");
  require_positive(grid.epsilons, "eps list");
  require_positive(grid.gammas, "gamma list");
  check_folds(grid, source.size());

  const std::size_t nm = grid.mus.size(), ne = grid.epsilons.size(), ng = grid.gammas.size();
  ValidationReport report;
  report.procedure = "pv";
  report.cells.resize(nm * ne * ng);
  auto index = [&](std::size_t im, std::size_t ie, std::size_t ig) { return (im * ne + ie) * ng + ig; };

  // The target never changes across folds: one PV per eps on the full source.
  std::vector<double> full_pv(ne);
  for (std::size_t ie = 0; ie < ne; ++ie)
    full_pv[ie] = pv_estimate(source.points(), target.points(), grid.epsilons[ie]);

  for (std::size_t im = 0; im < nm; ++im)
    for (std::size_t ie = 0; ie < ne; ++ie)
      for (std::size_t ig = 0; ig < ng; ++ig) {
        CellResult& c = report.cells[index(im, ie, ig)];
        c.cell = GridCell{grid.mus[im], grid.epsilons[ie], grid.gammas[ig], 0};
        c.pv = full_pv[ie];
        c.feasible = true;
      }

  const auto splits = make_splits(source.labels(), grid.k_folds, seed);
  for (const FoldSplit& split : splits) {
    const LabeledSample train = source.subset(split.train);
    const LabeledSample held_out = source.subset(split.held_out);
    const LabeledSample& labeling_source = options.reduced_source_matching ? train : source;

    for (std::size_t ie = 0; ie < ne; ++ie) {
      const Matching matching = compute_matching(labeling_source.points(), target.points(), grid.epsilons[ie]);
      if (matching.empty()) {
        for (std::size_t im = 0; im < nm; ++im)
          for (std::size_t ig = 0; ig < ng; ++ig) mark_infeasible(report.cells[index(im, ie, ig)], "empty matching");
        continue;
      }
      const LabeledSample self_labeled = pv_self_label(labeling_source, target, matching);

      for (std::size_t ig = 0; ig < ng; ++ig) {
        const VoterSet voters = VoterSet::build_from_sample(self_labeled.points(), grid.gammas[ig]);
        const OutputMoments moments(voters.evaluate_matrix(self_labeled.points()));
        const Eigen::MatrixXd held_outputs = voters.evaluate_matrix(held_out.points());
        sweep_mus(
            moments, self_labeled.labels(), grid.mus, options.solver,
            [&](std::size_t im) -> CellResult& { return report.cells[index(im, ie, ig)]; },
            [&](const Posterior& rho) { return bayes_risk(scores_from_outputs(held_outputs, rho), held_out.labels()); });
      }
    }
  }
  return finish(std::move(report));
}

ValidationReport kfold_validate(const LabeledSample& source, const HyperGrid& grid, std::uint64_t seed,
                                const SolverOptions& solver) {
  require_positive(grid.mus, "mu list");
  require_positive(grid.gammas, "gamma list");
  check_folds(grid, source.size());

  const std::size_t nm = grid.mus.size(), ng = grid.gammas.size();
  ValidationReport report;
  report.procedure = "kfold";
  report.cells.resize(nm * ng);
  for (std::size_t im = 0; im < nm; ++im)
    for (std::size_t ig = 0; ig < ng; ++ig) {
      CellResult& c = report.cells[im * ng + ig];
      c.cell = GridCell{grid.mus[im], std::numeric_limits<double>::quiet_NaN(), grid.gammas[ig], 0};
      c.feasible = true;
    }

  for (const FoldSplit& split : make_splits(source.labels(), grid.k_folds, seed)) {
    const LabeledSample train = source.subset(split.train);
    const LabeledSample held_out = source.subset(split.held_out);
    for (std::size_t ig = 0; ig < ng; ++ig) {
      const VoterSet voters = VoterSet::build_from_sample(train.points(), grid.gammas[ig]);
      const OutputMoments moments(voters.evaluate_matrix(train.points()));
      const Eigen::MatrixXd held_outputs = voters.evaluate_matrix(held_out.points());
      sweep_mus(
          moments, train.labels(), grid.mus, solver,
          [&](std::size_t im) -> CellResult& { return report.cells[im * ng + ig]; },
          [&](const Posterior& rho) { return bayes_risk(scores_from_outputs(held_outputs, rho), held_out.labels()); });
    }
  }
  return finish(std::move(report));
}

SelfLabeler nn_labeler() {
  return [](const LabeledSample& source, const UnlabeledSample& target, const GridCell& cell) {
    return nn_self_label(source, target, std::min(cell.neighbors, source.size()));
  };
}

ValidationReport reverse_validate(const LabeledSample& source, const UnlabeledSample& target,
                                  const HyperGrid& grid, const SelfLabeler& labeler, std::uint64_t seed,
                                  const SolverOptions& solver) {
  require_positive(grid.mus, "mu list");
  require_positive(grid.gammas, "gamma list");
  if (grid.neighbors.empty()) throw std::invalid_argument("hyperparameter grid: empty neighbour list");
  for (std::size_t k : grid.neighbors)
    if (k == 0) throw std::invalid_argument("hyperparameter grid: neighbour count must be positive");
  check_folds(grid, source.size());

  const std::size_t nm = grid.mus.size(), ng = grid.gammas.size(), nk = grid.neighbors.size();
  ValidationReport report;
  report.procedure = "reverse";
  report.cells.resize(nm * ng * nk);
  auto index = [&](std::size_t im, std::size_t ig, std::size_t ik) { return (im * ng + ig) * nk + ik; };
  for (std::size_t im = 0; im < nm; ++im)
    for (std::size_t ig = 0; ig < ng; ++ig)
      for (std::size_t ik = 0; ik < nk; ++ik) {
        CellResult& c = report.cells[index(im, ig, ik)];
        c.cell = GridCell{grid.mus[im], std::numeric_limits<double>::quiet_NaN(), grid.gammas[ig], grid.neighbors[ik]};
        c.feasible = true;
      }

  // Voters anchored at T evaluated on T, one per gamma; shared by every
  // reverse vote and by forward votes whose self-labeled sample is all of T.
  std::vector<OutputMoments> target_moments;
  target_moments.reserve(ng);
  for (double gamma : grid.gammas)
    target_moments.emplace_back(VoterSet::build_from_sample(target.points(), gamma).evaluate_matrix(target.points()));

  for (const FoldSplit& split : make_splits(source.labels(), grid.k_folds, seed)) {
    const LabeledSample train = source.subset(split.train);
    const LabeledSample held_out = source.subset(split.held_out);
    std::vector<Eigen::MatrixXd> held_outputs(ng);
    for (std::size_t ig = 0; ig < ng; ++ig)
      held_outputs[ig] = VoterSet::build_from_sample(target.points(), grid.gammas[ig]).evaluate_matrix(held_out.points());

    // Different neighbour counts often give the same labelling; programs
    // that only depend on (mu, gamma, labels) are solved once per fold.
    using Key = std::tuple<std::size_t, std::size_t, std::vector<Label>>;
    std::map<Key, std::vector<Label>> forward_cache;
    std::map<Key, double> reverse_cache;

    for (std::size_t im = 0; im < nm; ++im)
      for (std::size_t ig = 0; ig < ng; ++ig)
        for (std::size_t ik = 0; ik < nk; ++ik) {
          CellResult& c = report.cells[index(im, ig, ik)];
          if (!c.feasible) continue;
          try {
            const LabeledSample self_labeled = labeler(train, target, c.cell);
            if (self_labeled.size() == 0) throw EmptySelfLabel();

            // Forward vote on the self-labeled target, then relabel all of T.
            std::vector<Label> relabeled;
            if (self_labeled.size() == target.size() && self_labeled.points() == target.points()) {
              Key key{im, ig, self_labeled.labels()};
              if (auto hit = forward_cache.find(key); hit != forward_cache.end()) {
                relabeled = hit->second;
              } else {
                const Posterior forward = solve(target_moments[ig].instance(self_labeled.labels(), c.cell.mu), solver);
                const Eigen::VectorXd s = scores_from_outputs(target_moments[ig].outputs(), forward);
                relabeled.resize(target.size());
                for (std::size_t t = 0; t < target.size(); ++t)
                  relabeled[t] = s[static_cast<Eigen::Index>(t)] > 0.0 ? 1 : -1;
                forward_cache.emplace(std::move(key), relabeled);
              }
            } else {
              const VoterSet voters = VoterSet::build_from_sample(self_labeled.points(), c.cell.gamma);
              const Posterior forward = solve(
                  assemble_from_outputs(voters.evaluate_matrix(self_labeled.points()), self_labeled.labels(), c.cell.mu),
                  solver);
              relabeled = MajorityVote(voters, forward).predict_all(target.points());
            }

            Key key{im, ig, std::move(relabeled)};
            auto hit = reverse_cache.find(key);
            if (hit == reverse_cache.end()) {
              const Posterior reverse = solve(target_moments[ig].instance(std::get<2>(key), c.cell.mu), solver);
              const double risk = bayes_risk(scores_from_outputs(held_outputs[ig], reverse), held_out.labels());
              hit = reverse_cache.emplace(std::move(key), risk).first;
            }
            c.fold_risks.push_back(hit->second);
          } catch (const InfeasibleMargin&) {
            mark_infeasible(c, "infeasible margin");
          } catch (const EmptySelfLabel&) {
            mark_infeasible(c, "empty self-labeled sample");
          }
        }
  }
  return finish(std::move(report));
}

}  // namespace pvmincq
