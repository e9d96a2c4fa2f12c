#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "pvmincq/matching.hpp"
#include "pvmincq/sample.hpp"
#include "pvmincq/voters.hpp"

namespace pvmincq {

class EmptySelfLabel : public std::runtime_error {
 public:
  EmptySelfLabel() : std::runtime_error("matching is empty: no target point received a label") {}
};

struct SelfLabeledPair {
  std::size_t target_index;
  std::size_t source_index;
  Label transferred_label;
};

/// Matched pairs ordered by target index, each carrying its source label.
std::vector<SelfLabeledPair> transferred_labels(const LabeledSample& source, const Matching& matching);

/// Target points that belong to a matched pair, labeled with their partner's
/// source label, in increasing target index. Unmatched target points are
/// dropped.
LabeledSample pv_self_label(const LabeledSample& source, const UnlabeledSample& target,
                            const Matching& matching);

/// Majority label among the k nearest source points (Euclidean, ties in
/// distance broken by lower source index). An even-k tie goes to the label of
/// the single nearest neighbour.
LabeledSample nn_self_label(const LabeledSample& source, const UnlabeledSample& target, std::size_t k);

/// Largest |h(x_s) - h(x_t)| over matched pairs and voters.
double epsilon_hat(const VoterSet& voters, const Matching& matching, const PointMatrix& source,
                   const PointMatrix& target);

}  // namespace pvmincq
