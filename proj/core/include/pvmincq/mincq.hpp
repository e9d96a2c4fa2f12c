#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "pvmincq/sample.hpp"
#include "pvmincq/voters.hpp"

namespace pvmincq {

/// The MinCq quadratic program
///
///   minimize    rho' M rho - A' rho
///   subject to  m' rho = c,   0 <= rho_j <= 1/n
///
/// with M the voters' second-moment matrix on the sample, A its row sums
/// divided by n, m the per-voter label correlation and c the margin target.
struct QPInstance {
  Eigen::MatrixXd second_moment;   ///< M, n x n
  Eigen::VectorXd linear_term;     ///< A
  Eigen::VectorXd first_moment;    ///< m
  double equality_rhs = 0.0;       ///< c
  double mu = 0.0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(first_moment.size()); }
  double upper_bound() const noexcept { return 1.0 / static_cast<double>(size()); }

  /// Same program with the margin target recomputed for another mu.
  QPInstance with_margin(double new_mu) const;

  /// Value of c for mu = 0, i.e. m' u with u the box midpoint.
  double neutral_rhs() const;
};

/// Raised when the requested margin cannot be reached inside the box.
class InfeasibleMargin : public std::runtime_error {
 public:
  InfeasibleMargin(double lo, double hi, double rhs);
  double achievable_low() const noexcept { return lo_; }
  double achievable_high() const noexcept { return hi_; }
  double requested() const noexcept { return rhs_; }

 private:
  double lo_, hi_, rhs_;
};

/// Voter outputs H(s, j) = h_j(x_s) on a fixed point set together with the
/// label-independent parts of the program (M and A), so that several
/// labelings and margins can share one O(m n^2) product.
class OutputMoments {
 public:
  explicit OutputMoments(Eigen::MatrixXd outputs);

  const Eigen::MatrixXd& outputs() const noexcept { return outputs_; }
  QPInstance instance(std::span<const Label> labels, double mu) const;

 private:
  Eigen::MatrixXd outputs_;
  Eigen::MatrixXd second_moment_;
  Eigen::VectorXd linear_term_;
  Eigen::VectorXd row_sums_;
};

/// Builds the program from voter outputs H(s, j) = h_j(x_s).
QPInstance assemble_from_outputs(const Eigen::MatrixXd& outputs, std::span<const Label> labels,
                                 double mu);
QPInstance assemble(const LabeledSample& sample, const VoterSet& voters, double mu);

struct Posterior {
  Eigen::VectorXd weights;   ///< rho_j in [0, 1/n]

  std::size_t size() const noexcept { return static_cast<std::size_t>(weights.size()); }

  /// 2 rho_j - 1/n: the weights of the auto-complemented vote.
  Eigen::VectorXd signed_weights() const;

  static Posterior uniform(std::size_t n);
};

struct SolverOptions {
  double tolerance = 1e-9;           ///< target KKT residual of the returned posterior
  double ridge = 1e-10;              ///< Tikhonov term; selects the minimum-norm minimizer
  std::size_t warmup_iterations = 0; ///< SMO steps before the active-set phase; 0 picks 10n
  std::size_t max_iterations = 0;    ///< cap on SMO steps in the fallback; 0 picks a size-dependent cap
};

struct SolverStats {
  std::size_t iterations = 0;         ///< SMO steps
  std::size_t active_set_steps = 0;
  double gap = 0.0;                   ///< KKT residual of the returned posterior
  bool converged = false;
};

/// Deterministic solver for the MinCq program: a short pairwise coordinate
/// descent (SMO) warm start followed by a primal active-set method on an
/// updated Cholesky factor of the free block. Falls back to SMO if the
/// active-set phase does not terminate.
/// Throws InfeasibleMargin when c lies outside [min m'rho, max m'rho].
Posterior solve(const QPInstance& qp, const SolverOptions& options = {}, SolverStats* stats = nullptr);

/// Interval of m' rho over the box.
std::pair<double, double> achievable_rhs(const QPInstance& qp);

double objective(const QPInstance& qp, const Eigen::VectorXd& rho);

/// max over coordinates of the KKT stationarity violation, minimised over the
/// equality multiplier.
double kkt_residual(const QPInstance& qp, const Eigen::VectorXd& rho);

double constraint_violation(const QPInstance& qp, const Eigen::VectorXd& rho);

/// Plain-text dump of a program (one row per voter) for debugging.
std::string to_csv(const QPInstance& qp);

/// B(x) = sign(sum_j (2 rho_j - 1/n) h_j(x)).
class MajorityVote {
 public:
  MajorityVote(VoterSet voters, Posterior posterior);

  const VoterSet& voters() const noexcept { return voters_; }
  const Posterior& posterior() const noexcept { return posterior_; }

  double score(const PointRef& x) const;
  /// +1 when the score is strictly positive, -1 otherwise.
  Label predict(const PointRef& x) const;

  Eigen::VectorXd scores(const PointMatrix& points) const;
  std::vector<Label> predict_all(const PointMatrix& points) const;

 private:
  VoterSet voters_;
  Posterior posterior_;
  Eigen::VectorXd signed_;
};

/// Scores of the auto-complemented vote from raw voter outputs.
Eigen::VectorXd scores_from_outputs(const Eigen::MatrixXd& outputs, const Posterior& posterior);

}  // namespace pvmincq
