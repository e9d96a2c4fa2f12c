#pragma once

#include "pvmincq/matching.hpp"
#include "pvmincq/mincq.hpp"
#include "pvmincq/sample.hpp"

namespace pvmincq {

/// Quantities measured on the matched subsamples S^ (matched source points,
/// true labels) and T^ (matched target points, transferred labels).
struct AdaptationDiagnostics {
  double eps_hat = 0.0;          ///< max |h(x_s) - h(x_t)| over pairs and voters
  double gibbs_source = 0.0;     ///< Gibbs risk on S^
  double gibbs_target = 0.0;     ///< Gibbs risk on T^
  double gibbs_gap = 0.0;        ///< |gibbs_target - gibbs_source|
  double dis_hat = 0.0;          ///< domain disagreement between S^ and T^
  double mean_abs_score = 0.0;   ///< mean |E_h h(x_t)| over T^
  double dis_bound = 0.0;        ///< eps_hat^2 + 2 eps_hat mean_abs_score
  double dis_bound_simplified = 0.0;   ///< eps_hat (1 + 2 mean_abs_score), valid for eps_hat <= 1
  double pv = 0.0;
  std::size_t matched = 0;

  bool gibbs_bound_holds = true;   ///< gibbs_gap <= eps_hat / 2
  bool dis_bound_holds = true;     ///< dis_hat <= dis_bound (and the simplified form when eps_hat <= 1)

  bool holds() const noexcept { return gibbs_bound_holds && dis_bound_holds; }
};

/// Slack used when comparing the measured quantities with their bounds.
inline constexpr double diagnostics_slack = 1e-12;

AdaptationDiagnostics diagnose(const MajorityVote& vote, const LabeledSample& source, const UnlabeledSample& target,
                               const Matching& matching);

}  // namespace pvmincq
