#include "pvmincq/metrics.hpp"

#include <cmath>

namespace pvmincq {

namespace {

void check_lengths(const Eigen::VectorXd& scores, std::span<const Label> labels) {
  if (static_cast<std::size_t>(scores.size()) != labels.size())
    throw std::invalid_argument("scores and labels differ in length");
  if (labels.empty()) throw std::invalid_argument("risk of an empty sample");
}

}  // namespace

MarginMoments margin_moments(const Eigen::VectorXd& scores, std::span<const Label> labels) {
  check_lengths(scores, labels);
  MarginMoments mm;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    mm.first += labels[static_cast<std::size_t>(i)] * scores[i];
    mm.second += scores[i] * scores[i];
  }
  const double m = static_cast<double>(labels.size());
  mm.first /= m;
  mm.second /= m;
  return mm;
}

MarginMoments margin_moments(const MajorityVote& vote, const LabeledSample& sample) {
  return margin_moments(vote.scores(sample.points()), sample.labels());
}

double gibbs_risk(const Eigen::VectorXd& scores, std::span<const Label> labels) {
  return 0.5 * (1.0 - margin_moments(scores, labels).first);
}

double gibbs_risk(const MajorityVote& vote, const LabeledSample& sample) {
  return gibbs_risk(vote.scores(sample.points()), sample.labels());
}

double bayes_risk(const Eigen::VectorXd& scores, std::span<const Label> labels) {
  check_lengths(scores, labels);
  std::size_t errors = 0;
  for (Eigen::Index i = 0; i < scores.size(); ++i)
    if (labels[static_cast<std::size_t>(i)] * scores[i] <= 0.0) ++errors;
  return static_cast<double>(errors) / static_cast<double>(labels.size());
}

double bayes_risk(const MajorityVote& vote, const LabeledSample& sample) {
  return bayes_risk(vote.scores(sample.points()), sample.labels());
}

double cbound(const MarginMoments& moments) {
  if (!(moments.first > 0.0)) throw CBoundUndefined();
  return 1.0 - moments.first * moments.first / moments.second;
}

BoundReport corollary_bound(const Eigen::VectorXd& scores, std::span<const Label> true_labels,
                            std::span<const Label> self_labels) {
  check_lengths(scores, true_labels);
  check_lengths(scores, self_labels);

  BoundReport r;
  const MarginMoments truth = margin_moments(scores, true_labels);
  r.gibbs_risk = 0.5 * (1.0 - truth.first);
  r.bayes_risk = bayes_risk(scores, true_labels);
  if (truth.first > 0.0) r.cbound = cbound(truth);

  r.self_bayes_risk = bayes_risk(scores, self_labels);
  r.self_cbound = cbound(margin_moments(scores, self_labels));

  double signed_sum = 0.0;
  double abs_sum = 0.0;
  for (std::size_t i = 0; i < true_labels.size(); ++i) {
    const double d = true_labels[i] - self_labels[i];
    signed_sum += d;
    abs_sum += std::abs(d);
  }
  const double m = static_cast<double>(true_labels.size());
  r.label_divergence = 0.5 * std::abs(signed_sum / m);
  r.label_disagreement = 0.5 * abs_sum / m;
  r.corollary_bound = r.self_cbound + r.label_divergence;
  return r;
}

BoundReport corollary_bound(const MajorityVote& vote, const LabeledSample& sample, const PointLabeler& labeler) {
  std::vector<Label> self(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    self[i] = labeler(sample.point(i));
    if (self[i] != 1 && self[i] != -1) throw std::invalid_argument("labeler must return -1 or +1");
  }
  return corollary_bound(vote.scores(sample.points()), sample.labels(), self);
}

double domain_disagreement(const Eigen::VectorXd& source_scores, const Eigen::VectorXd& target_scores) {
  if (source_scores.size() == 0 || target_scores.size() == 0)
    throw std::invalid_argument("disagreement over an empty sample");
  return std::abs(target_scores.squaredNorm() / static_cast<double>(target_scores.size()) -
                  source_scores.squaredNorm() / static_cast<double>(source_scores.size()));
}

double domain_disagreement(const MajorityVote& vote, const PointMatrix& source, const PointMatrix& target) {
  return domain_disagreement(vote.scores(source), vote.scores(target));
}

Factor2Check factor2_check(const Eigen::VectorXd& scores, std::span<const Label> labels) {
  Factor2Check c;
  c.bayes = bayes_risk(scores, labels);
  c.gibbs = gibbs_risk(scores, labels);
  c.holds = c.bayes <= 2.0 * c.gibbs + 1e-12;
  return c;
}

Factor2Check factor2_check(const MajorityVote& vote, const LabeledSample& sample) {
  return factor2_check(vote.scores(sample.points()), sample.labels());
}

}  // namespace pvmincq
