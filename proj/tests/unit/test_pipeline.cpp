#include <cmath>

#include <doctest.h>

#include "oracles.hpp"
#include "pvmincq/dataset.hpp"
#include "pvmincq/diagnostics.hpp"
#include "pvmincq/pipeline.hpp"
#include "pvmincq/selflabel.hpp"

using namespace pvmincq;

namespace {

LabeledSample rotate_about(const LabeledSample& s, const LabeledSample& ref, double degrees) {
  return apply_shift(s, Rotation{degrees, Eigen::Vector2d(centroid(ref.points()))});
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("identical domains with the identity matching give zeros") {
  const LabeledSample s = generate_moons(20, 20, 0.05, 1);
  const Matching m = compute_matching(s.points(), s.points(), 1e-9);
  const MajorityVote vote = train_mincq(s, 1.0, 0.01);
  const AdaptationDiagnostics d = diagnose(vote, s, s.unlabeled(), m);
  CHECK(d.eps_hat == 0.0);
  CHECK(d.gibbs_gap == 0.0);
  CHECK(d.dis_hat == 0.0);
  CHECK(d.holds());
}

TEST_CASE("one pair and one voter in closed form") {
  PointMatrix xs(2, 1), xt(2, 1), anchor(2, 1);
  xs << 0.2, 0;
  xt << 0, 0.4;
  anchor << 0, 0;
  const double gamma = 1.5, rho = 0.8;
  const LabeledSample s(xs, {1});
  const UnlabeledSample t(xt);
  const Matching m = compute_matching(xs, xt, 1.0);
  const MajorityVote vote(VoterSet::build_from_sample(anchor, gamma), Posterior{Eigen::VectorXd::Constant(1, rho)});
  const AdaptationDiagnostics d = diagnose(vote, s, t, m);

  const double hs = std::exp(-gamma * 0.04), ht = std::exp(-gamma * 0.16);
  const double w = 2.0 * rho - 1.0;
  CHECK(d.eps_hat == doctest::Approx(std::abs(hs - ht)));
  CHECK(d.gibbs_source == doctest::Approx(0.5 * (1.0 - w * hs)));
  CHECK(d.gibbs_target == doctest::Approx(0.5 * (1.0 - w * ht)));
  CHECK(d.dis_hat == doctest::Approx(std::abs(w * w * (ht * ht - hs * hs))));
  CHECK(d.mean_abs_score == doctest::Approx(std::abs(w * ht)));
  CHECK(d.dis_bound == doctest::Approx(d.eps_hat * d.eps_hat + 2.0 * d.eps_hat * d.mean_abs_score));
  CHECK(d.holds());
}

TEST_CASE("trained 20 degree pipeline satisfies both deviation bounds") {
  const LabeledSample s = generate_moons(150, 150, 0.05, 2);
  const UnlabeledSample t = rotate_about(generate_moons(150, 150, 0.05, 3), s, 20.0).unlabeled();
  for (double eps : {0.1, 0.3, 0.8})
    for (double gamma : {0.5, 2.0}) {
      const PvMinCqModel model = train_pv_mincq(s, t, gamma, 0.01, eps);
      const AdaptationDiagnostics d = diagnose(model.vote, s, t, model.matching);
      CHECK(d.gibbs_gap <= 0.5 * d.eps_hat + diagnostics_slack);
      CHECK(d.dis_hat <= d.dis_bound + diagnostics_slack);
      CHECK(d.holds());
    }
}

}

TEST_SUITE("pipeline") {

TEST_CASE("MinCq separates unshifted moons") {
  const LabeledSample train = generate_moons(100, 100, 0.05, 4);
  const LabeledSample test = generate_moons(300, 300, 0.05, 5);
  CHECK(accuracy(train_mincq(train, 2.0, 0.01), test) > 0.95);
}

TEST_CASE("PV-MinCq adapts to a 30 degree rotation") {
  const LabeledSample s = generate_moons(150, 150, 0.05, 6);
  const LabeledSample target = rotate_about(generate_moons(150, 150, 0.05, 7), s, 30.0);
  const LabeledSample test = rotate_about(generate_moons(300, 300, 0.05, 8), s, 30.0);
  const PvMinCqModel model = train_pv_mincq(s, target.unlabeled(), 2.0, 0.01, 0.3);
  CHECK(model.self_labeled.size() == model.matching.size());
  CHECK(accuracy(model.vote, test) > 0.85);
}

TEST_CASE("NN-MinCq flags a single self-label") {
  const LabeledSample s = generate_moons(30, 30, 0.05, 9);
  oracle::Rng rng(1);
  // a tight cluster far away: every target point has the same nearest neighbour
  PointMatrix far = oracle::random_points(rng, 2, 10, 0.0, 0.01);
  far.row(0).array() += 50.0;
  const NnMinCqModel model = train_nn_mincq(s, UnlabeledSample(far), 1.0, 1e-4, 1);
  CHECK(model.single_label);
  const NnMinCqModel normal =
      train_nn_mincq(s, rotate_about(generate_moons(30, 30, 0.05, 10), s, 20.0).unlabeled(), 1.0, 0.01, 3);
  CHECK_FALSE(normal.single_label);
}

TEST_CASE("empty PV matching propagates as an error") {
  const LabeledSample s = generate_moons(10, 10, 0.0, 11);
  const UnlabeledSample t(apply_shift(s.points(), Translation{Eigen::Vector2d(100.0, 0.0)}));
  CHECK_THROWS_AS(train_pv_mincq(s, t, 1.0, 0.01, 0.5), EmptySelfLabel);
}

}
