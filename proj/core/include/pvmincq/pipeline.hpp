#pragma once

#include <cstddef>

#include "pvmincq/matching.hpp"
#include "pvmincq/mincq.hpp"
#include "pvmincq/sample.hpp"

namespace pvmincq {

/// MinCq on a labeled sample with Gaussian voters anchored at its points.
MajorityVote train_mincq(const LabeledSample& sample, double gamma, double mu,
                         const SolverOptions& options = {});

struct PvMinCqModel {
  MajorityVote vote;
  Matching matching;
  LabeledSample self_labeled;
};

/// Match S and T within eps, transfer source labels across the matched
/// pairs and run MinCq on the resulting self-labeled target sample.
PvMinCqModel train_pv_mincq(const LabeledSample& source, const UnlabeledSample& target, double gamma,
                            double mu, double eps, const SolverOptions& options = {});

struct NnMinCqModel {
  MajorityVote vote;
  LabeledSample self_labeled;
  bool single_label = false;   ///< every target point received the same label
};

NnMinCqModel train_nn_mincq(const LabeledSample& source, const UnlabeledSample& target, double gamma,
                            double mu, std::size_t k, const SolverOptions& options = {});

/// Fraction of correctly classified points (score > 0 on +1, < 0 on -1).
double accuracy(const MajorityVote& vote, const LabeledSample& sample);

}  // namespace pvmincq
