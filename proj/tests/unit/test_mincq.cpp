#include <cmath>

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include "oracles.hpp"
#include "pvmincq/mincq.hpp"

using namespace pvmincq;

namespace {

Eigen::VectorXd midpoint(std::size_t n) {
  return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 0.5 / static_cast<double>(n));
}

}  // namespace

TEST_SUITE("mincq.assembly") {

TEST_CASE("one constant voter on an all-positive sample") {
  const Eigen::MatrixXd H = Eigen::MatrixXd::Ones(4, 1);
  const std::vector<Label> y{1, 1, 1, 1};
  const QPInstance qp = assemble_from_outputs(H, y, 0.5);
  CHECK(qp.first_moment[0] == doctest::Approx(1.0));
  CHECK(qp.second_moment(0, 0) == doctest::Approx(1.0));
  CHECK(qp.equality_rhs == doctest::Approx(0.75));
}

TEST_CASE("second moment equals the averaged outer products") {
  oracle::Rng rng(10);
  Eigen::MatrixXd H(4, 3);
  for (Eigen::Index i = 0; i < H.size(); ++i) H.data()[i] = oracle::uniform(rng, 0.0, 1.0);
  const QPInstance qp = assemble_from_outputs(H, std::vector<Label>{1, -1, 1, -1}, 0.1);
  CHECK((qp.second_moment - oracle::second_moment_loop(H)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("property: A = 2 M u and M is symmetric positive semidefinite") {
  oracle::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const QPInstance qp = oracle::random_program(rng, oracle::uniform_index(rng, 1, 25), 30);
    const Eigen::VectorXd u = midpoint(qp.size());
    CHECK((qp.linear_term - 2.0 * qp.second_moment * u).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((qp.second_moment - qp.second_moment.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(qp.second_moment);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-12);
  }
}

TEST_CASE("property: completed-square form of the objective") {
  oracle::Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const QPInstance qp = oracle::random_program(rng, 6, 15);
    const Eigen::VectorXd u = midpoint(qp.size());
    Eigen::VectorXd rho(6);
    for (Eigen::Index j = 0; j < 6; ++j) rho[j] = oracle::uniform(rng, 0.0, qp.upper_bound());
    const double lhs = objective(qp, rho);
    const double rhs = (rho - u).dot(qp.second_moment * (rho - u)) - u.dot(qp.second_moment * u);
    CHECK(std::abs(lhs - rhs) <= 1e-9);
    CHECK(std::abs(lhs - oracle::qp_objective(qp, rho)) <= 1e-12);
  }
}

TEST_CASE("assembly rejects a non-positive margin and mismatched inputs") {
  const Eigen::MatrixXd H = Eigen::MatrixXd::Ones(3, 2);
  CHECK_THROWS(assemble_from_outputs(H, std::vector<Label>{1, -1, 1}, 0.0));
  CHECK_THROWS(assemble_from_outputs(H, std::vector<Label>{1, -1, 1}, -0.2));
  CHECK_THROWS(assemble_from_outputs(H, std::vector<Label>{1, -1}, 0.1));
  CHECK_THROWS(assemble_from_outputs(H, std::vector<Label>{1, 0, 1}, 0.1));
  const LabeledSample s(PointMatrix::Zero(3, 3), {1, -1, 1});
  CHECK_THROWS_AS(assemble(s, VoterSet::build_from_sample(PointMatrix::Zero(2, 1), 1.0), 0.1), SampleError);
}

}

TEST_SUITE("mincq.solver") {

TEST_CASE("n = 2 matches the grid oracle over the feasible segment") {
  oracle::Rng rng(20);
  for (int trial = 0; trial < 40; ++trial) {
    const QPInstance qp = oracle::random_program(rng, 2, 12);
    const Posterior p = solve(qp);
    const double solved = oracle::qp_objective(qp, p.weights);
    const double grid = oracle::grid_minimum_n2(qp);
    CHECK(solved <= grid + 1e-12);
    CHECK(grid - solved <= 1e-6);
  }
}

TEST_CASE("small programs beat random feasible points and satisfy the optimality conditions") {
  oracle::Rng rng(21);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t n = oracle::uniform_index(rng, 3, 10);
    const QPInstance qp = oracle::random_program(rng, n, 20);
    SolverStats stats;
    const Posterior p = solve(qp, {}, &stats);
    CHECK(stats.converged);
    CHECK(oracle::kkt_violation(qp, p.weights) <= 1e-6);
    CHECK(std::abs(qp.first_moment.dot(p.weights) - qp.equality_rhs) <= 1e-8);
    CHECK(p.weights.minCoeff() >= 0.0);
    CHECK(p.weights.maxCoeff() <= qp.upper_bound());
    const double best = oracle::qp_objective(qp, p.weights);
    double worst_gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 2000; ++k)
      worst_gap = std::min(worst_gap, oracle::qp_objective(qp, oracle::random_feasible_point(rng, qp)) - best);
    CHECK(worst_gap >= -1e-12);
  }
}

TEST_CASE("larger programs agree with the independent optimality check") {
  oracle::Rng rng(22);
  for (std::size_t n : {20u, 45u, 80u}) {
    const QPInstance qp = oracle::random_program(rng, n, 60);
    SolverStats stats;
    const Posterior p = solve(qp, {}, &stats);
    CHECK(stats.converged);
    CHECK(oracle::kkt_violation(qp, p.weights) <= 1e-6);
    CHECK(std::abs(kkt_residual(qp, p.weights) - oracle::kkt_violation(qp, p.weights)) <= 1e-9);
    CHECK(constraint_violation(qp, p.weights) <= 1e-8);
  }
}

TEST_CASE("zero margin returns the box midpoint") {
  oracle::Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = oracle::uniform_index(rng, 2, 12);
    // distinct anchors with at least as many points keep M positive definite
    QPInstance qp = oracle::random_program(rng, n, 40);
    qp.equality_rhs = qp.neutral_rhs();
    const Posterior p = solve(qp);
    CHECK((p.weights - midpoint(n)).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("infeasible margins report the achievable interval") {
  const Eigen::MatrixXd H = Eigen::MatrixXd::Constant(4, 2, 0.5);
  const QPInstance qp = assemble_from_outputs(H, std::vector<Label>{1, 1, 1, -1}, 5.0);
  try {
    solve(qp);
    FAIL("expected InfeasibleMargin");
  } catch (const InfeasibleMargin& e) {
    CHECK(e.requested() == doctest::Approx(qp.equality_rhs));
    CHECK(e.achievable_high() == doctest::Approx(0.25));
    CHECK(e.achievable_low() == doctest::Approx(0.0));
  }
}

TEST_CASE("property: solving twice is bit-identical") {
  oracle::Rng rng(24);
  const QPInstance qp = oracle::random_program(rng, 30, 40);
  const Posterior a = solve(qp), b = solve(qp);
  CHECK(a.weights == b.weights);
}

TEST_CASE("property: the box holds exactly and the plane within 1e-8") {
  oracle::Rng rng(25);
  for (int trial = 0; trial < 20; ++trial) {
    const QPInstance qp = oracle::random_program(rng, oracle::uniform_index(rng, 1, 40), 30);
    const Posterior p = solve(qp);
    CHECK(p.weights.minCoeff() >= 0.0);
    CHECK(p.weights.maxCoeff() <= qp.upper_bound());
    CHECK(constraint_violation(qp, p.weights) <= 1e-8);
  }
}

}

TEST_SUITE("mincq.vote") {

TEST_CASE("midpoint weights give a zero score everywhere") {
  oracle::Rng rng(30);
  const PointMatrix a = oracle::random_points(rng, 2, 5);
  const MajorityVote vote(VoterSet::build_from_sample(a, 1.0), Posterior::uniform(5));
  const PointMatrix x = oracle::random_points(rng, 2, 20);
  CHECK(vote.scores(x).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(vote.predict(x.col(0)) == -1);
}

TEST_CASE("full weight on a single voter predicts +1 everywhere") {
  oracle::Rng rng(31);
  const PointMatrix a = oracle::random_points(rng, 2, 4);
  // with more voters the others enter with weight -1/n
  Eigen::VectorXd w = Eigen::VectorXd::Zero(4);
  w[0] = 0.25;
  const MajorityVote single(VoterSet::build_from_sample(a.leftCols(1), 0.5), Posterior{Eigen::VectorXd::Constant(1, 1.0)});
  const PointMatrix x = oracle::random_points(rng, 2, 30, -3.0, 3.0);
  for (Label l : single.predict_all(x)) CHECK(l == 1);
  const MajorityVote vote(VoterSet::build_from_sample(a, 0.5), Posterior{w});
  CHECK(vote.score(a.col(0)) == doctest::Approx(oracle::vote_score(oracle::kernel_outputs(a, a, 0.5), 0, w)));
}

TEST_CASE("scores equal the direct weighted sum") {
  oracle::Rng rng(32);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = oracle::uniform_index(rng, 1, 15);
    const PointMatrix a = oracle::random_points(rng, 2, n);
    Eigen::VectorXd rho(static_cast<Eigen::Index>(n));
    for (Eigen::Index j = 0; j < rho.size(); ++j) rho[j] = oracle::uniform(rng, 0.0, 1.0 / static_cast<double>(n));
    const double gamma = oracle::uniform(rng, 0.2, 3.0);
    const MajorityVote vote(VoterSet::build_from_sample(a, gamma), Posterior{rho});
    const PointMatrix x = oracle::random_points(rng, 2, 25);
    const Eigen::MatrixXd H = oracle::kernel_outputs(x, a, gamma);
    const Eigen::VectorXd s = vote.scores(x);
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
      CHECK(s[i] == doctest::Approx(oracle::vote_score(H, i, rho)).epsilon(1e-12));
      CHECK(vote.score(x.col(i)) == doctest::Approx(s[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("posterior size must match the voters") {
  CHECK_THROWS(MajorityVote(VoterSet::build_from_sample(PointMatrix::Zero(2, 3), 1.0), Posterior::uniform(2)));
}

}
