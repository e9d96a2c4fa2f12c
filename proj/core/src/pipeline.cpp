#include "pvmincq/pipeline.hpp"

#include "pvmincq/metrics.hpp"
#include "pvmincq/selflabel.hpp"

namespace pvmincq {

MajorityVote train_mincq(const LabeledSample& sample, double gamma, double mu, const SolverOptions& options) {
  VoterSet voters = VoterSet::build_from_sample(sample.points(), gamma);
  const QPInstance qp = assemble(sample, voters, mu);
  Posterior rho = solve(qp, options);
  return MajorityVote(std::move(voters), std::move(rho));
}

PvMinCqModel train_pv_mincq(const LabeledSample& source, const UnlabeledSample& target, double gamma,
                            double mu, double eps, const SolverOptions& options) {
  Matching matching = compute_matching(source.points(), target.points(), eps);
  LabeledSample self_labeled = pv_self_label(source, target, matching);
  MajorityVote vote = train_mincq(self_labeled, gamma, mu, options);
  return PvMinCqModel{std::move(vote), std::move(matching), std::move(self_labeled)};
}

NnMinCqModel train_nn_mincq(const LabeledSample& source, const UnlabeledSample& target, double gamma,
                            double mu, std::size_t k, const SolverOptions& options) {
  LabeledSample self_labeled = nn_self_label(source, target, k);
  const bool single = self_labeled.count(1) == 0 || self_labeled.count(-1) == 0;
  MajorityVote vote = train_mincq(self_labeled, gamma, mu, options);
  return NnMinCqModel{std::move(vote), std::move(self_labeled), single};
}

double accuracy(const MajorityVote& vote, const LabeledSample& sample) {
  return 1.0 - bayes_risk(vote, sample);
}

}  // namespace pvmincq
