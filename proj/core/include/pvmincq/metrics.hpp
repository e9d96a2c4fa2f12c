#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>

#include <Eigen/Core>

#include "pvmincq/mincq.hpp"
#include "pvmincq/sample.hpp"

namespace pvmincq {

// All moments below are taken under the auto-complemented posterior: voter
// h_j carries weight rho_j and -h_j carries 1/n - rho_j, so that
// E_{h~rho} h(x) is the vote score sum_j (2 rho_j - 1/n) h_j(x). The metrics
// are therefore functions of the score vector on the sample.

/// First and second moments of the rho-margin y * E_h h(x).
struct MarginMoments {
  double first = 0.0;    ///< mean of y * score
  double second = 0.0;   ///< mean of score^2
};

MarginMoments margin_moments(const Eigen::VectorXd& scores, std::span<const Label> labels);
MarginMoments margin_moments(const MajorityVote& vote, const LabeledSample& sample);

/// 1/2 (1 - first moment).
double gibbs_risk(const Eigen::VectorXd& scores, std::span<const Label> labels);
double gibbs_risk(const MajorityVote& vote, const LabeledSample& sample);

/// Fraction of points with y * score <= 0; a zero score is an error.
double bayes_risk(const Eigen::VectorXd& scores, std::span<const Label> labels);
double bayes_risk(const MajorityVote& vote, const LabeledSample& sample);

class CBoundUndefined : public std::domain_error {
 public:
  CBoundUndefined() : std::domain_error("C-bound needs a positive first margin moment") {}
};

/// 1 - first^2 / second, defined for first > 0.
double cbound(const MarginMoments& moments);

using PointLabeler = std::function<Label(const PointRef&)>;

struct BoundReport {
  double gibbs_risk = 0.0;              ///< true labels
  double bayes_risk = 0.0;              ///< true labels
  std::optional<double> cbound;         ///< true labels, when the first moment is positive
  double self_bayes_risk = 0.0;         ///< risk of the vote measured against l
  double self_cbound = 0.0;             ///< C-bound with y replaced by l
  double label_divergence = 0.0;        ///< 1/2 |mean(y - l(x))|
  double label_disagreement = 0.0;      ///< 1/2 mean|y - l(x)|, the fraction where l != y
  double corollary_bound = 0.0;         ///< self_cbound + label_divergence
  std::optional<double> domain_disagreement;
};

/// C-bound for a self-labeling function l. Throws CBoundUndefined when the
/// margin moment under l is not positive.
BoundReport corollary_bound(const Eigen::VectorXd& scores, std::span<const Label> true_labels,
                            std::span<const Label> self_labels);
BoundReport corollary_bound(const MajorityVote& vote, const LabeledSample& sample, const PointLabeler& labeler);

/// |mean score^2 on target - mean score^2 on source|.
double domain_disagreement(const Eigen::VectorXd& source_scores, const Eigen::VectorXd& target_scores);
double domain_disagreement(const MajorityVote& vote, const PointMatrix& source, const PointMatrix& target);

struct Factor2Check {
  double bayes = 0.0;
  double gibbs = 0.0;
  bool holds = true;   ///< bayes <= 2 gibbs + 1e-12
};

Factor2Check factor2_check(const Eigen::VectorXd& scores, std::span<const Label> labels);
Factor2Check factor2_check(const MajorityVote& vote, const LabeledSample& sample);

}  // namespace pvmincq
