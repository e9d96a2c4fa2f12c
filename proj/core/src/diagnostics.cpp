#include "pvmincq/diagnostics.hpp"

#include "pvmincq/metrics.hpp"
#include "pvmincq/selflabel.hpp"

namespace pvmincq {

AdaptationDiagnostics diagnose(const MajorityVote& vote, const LabeledSample& source, const UnlabeledSample& target,
                               const Matching& matching) {
  if (matching.empty()) throw EmptySelfLabel();

  const auto pairs = transferred_labels(source, matching);
  std::vector<std::size_t> src_idx, tgt_idx;
  std::vector<Label> labels;
  for (const auto& p : pairs) {
    src_idx.push_back(p.source_index);
    tgt_idx.push_back(p.target_index);
    labels.push_back(p.transferred_label);
  }
  const PointMatrix matched_source = select_columns(source.points(), src_idx);
  const PointMatrix matched_target = select_columns(target.points(), tgt_idx);
  const Eigen::VectorXd source_scores = vote.scores(matched_source);
  const Eigen::VectorXd target_scores = vote.scores(matched_target);

  AdaptationDiagnostics d;
  d.matched = pairs.size();
  d.pv = matching.pv;
  d.eps_hat = epsilon_hat(vote.voters(), matching, source.points(), target.points());
  d.gibbs_source = gibbs_risk(source_scores, labels);
  d.gibbs_target = gibbs_risk(target_scores, labels);
  d.gibbs_gap = std::abs(d.gibbs_target - d.gibbs_source);
  d.dis_hat = domain_disagreement(source_scores, target_scores);
  d.mean_abs_score = target_scores.cwiseAbs().mean();
  d.dis_bound = d.eps_hat * d.eps_hat + 2.0 * d.eps_hat * d.mean_abs_score;
  d.dis_bound_simplified = d.eps_hat * (1.0 + 2.0 * d.mean_abs_score);

  d.gibbs_bound_holds = d.gibbs_gap <= 0.5 * d.eps_hat + diagnostics_slack;
  d.dis_bound_holds = d.dis_hat <= d.dis_bound + diagnostics_slack;
  if (d.eps_hat <= 1.0) d.dis_bound_holds = d.dis_bound_holds && d.dis_hat <= d.dis_bound_simplified + diagnostics_slack;
  return d;
}

}  // namespace pvmincq
