#include <cmath>

#include <doctest.h>

#include "oracles.hpp"
#include "pvmincq/voters.hpp"

using namespace pvmincq;

TEST_SUITE("voters") {

TEST_CASE("a voter outputs 1 at its anchor") {
  PointMatrix a(2, 1);
  a << 0.3, -0.7;
  const VoterSet h = VoterSet::build_from_sample(a, 2.5);
  CHECK(h.evaluate(0, a.col(0)) == 1.0);
}

TEST_CASE("closed form at unit distance") {
  const VoterSet h = VoterSet::build_from_sample(PointMatrix::Zero(2, 1), 1.0);
  CHECK(h.evaluate(0, Eigen::Vector2d(1.0, 0.0)) == doctest::Approx(0.367879441171));
  CHECK(h.evaluate_matrix(Eigen::MatrixXd(Eigen::Vector2d(1.0, 0.0)))(0, 0) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("wide bandwidth decays towards zero but stays positive") {
  const VoterSet h = VoterSet::build_from_sample(PointMatrix::Zero(2, 1), 50.0);
  const double v = h.evaluate(0, Eigen::Vector2d(3.0, 0.0));
  CHECK(v > 0.0);
  CHECK(v < 1e-100);
}

TEST_CASE("matrix on the anchors has a unit diagonal and is symmetric") {
  oracle::Rng rng(1);
  const PointMatrix a = oracle::random_points(rng, 2, 12);
  const Eigen::MatrixXd H = VoterSet::build_from_sample(a, 0.8).evaluate_matrix(a);
  for (Eigen::Index i = 0; i < H.rows(); ++i) CHECK(H(i, i) == 1.0);
  CHECK((H - H.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("matrix equals the double-loop kernel and lies in (0, 1]") {
  oracle::Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const PointMatrix a = oracle::random_points(rng, 3, 7);
    const PointMatrix x = oracle::random_points(rng, 3, 9);
    const double gamma = oracle::uniform(rng, 0.1, 5.0);
    const Eigen::MatrixXd H = VoterSet::build_from_sample(a, gamma).evaluate_matrix(x);
    CHECK((H - oracle::kernel_outputs(x, a, gamma)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(H.minCoeff() > 0.0);
    CHECK(H.maxCoeff() <= 1.0);
  }
}

TEST_CASE("property: a larger bandwidth never raises an off-diagonal entry") {
  oracle::Rng rng(3);
  const PointMatrix a = oracle::random_points(rng, 2, 10);
  Eigen::MatrixXd prev = VoterSet::build_from_sample(a, 0.1).evaluate_matrix(a);
  for (double gamma : {0.2, 0.5, 1.0, 3.0, 10.0}) {
    const Eigen::MatrixXd cur = VoterSet::build_from_sample(a, gamma).evaluate_matrix(a);
    CHECK((cur - prev).maxCoeff() <= 0.0);
    prev = cur;
  }
}

TEST_CASE("bad bandwidths and dimensions are rejected") {
  const PointMatrix a = PointMatrix::Zero(2, 3);
  CHECK_THROWS(VoterSet::build_from_sample(a, 0.0));
  CHECK_THROWS(VoterSet::build_from_sample(a, -1.0));
  CHECK_THROWS(VoterSet::build_from_sample(a, std::numeric_limits<double>::infinity()));
  CHECK_THROWS(VoterSet::build_from_sample(PointMatrix(2, 0), 1.0));
  const VoterSet h = VoterSet::build_from_sample(a, 1.0);
  CHECK_THROWS_AS(h.evaluate(Eigen::Vector3d::Zero()), SampleError);
  CHECK_THROWS_AS(h.evaluate_matrix(PointMatrix::Zero(3, 2)), SampleError);
}

}
