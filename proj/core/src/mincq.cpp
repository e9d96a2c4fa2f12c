#include "pvmincq/mincq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pvmincq {

InfeasibleMargin::InfeasibleMargin(double lo, double hi, double rhs)
    : std::runtime_error([&] {
        std::ostringstream os;
        os.precision(17);
        os << "margin target " << rhs << " outside achievable interval [" << lo << ", " << hi << "]";
        return os.str();
      }()),
      lo_(lo),
      hi_(hi),
      rhs_(rhs) {}

OutputMoments::OutputMoments(Eigen::MatrixXd outputs) : outputs_(std::move(outputs)) {
  const auto m = outputs_.rows();
  const auto n = outputs_.cols();
  if (m == 0 || n == 0) throw std::invalid_argument("empty voter output matrix");
  const double inv_m = 1.0 / static_cast<double>(m);
  const double inv_n = 1.0 / static_cast<double>(n);

  second_moment_ = Eigen::MatrixXd::Zero(n, n);
  second_moment_.selfadjointView<Eigen::Lower>().rankUpdate(outputs_.transpose(), inv_m);
  second_moment_.triangularView<Eigen::StrictlyUpper>() = second_moment_.transpose();

  row_sums_ = outputs_.rowwise().sum();   // sum_j' h_j'(x_s)
  linear_term_.noalias() = outputs_.transpose() * row_sums_;
  linear_term_ *= inv_m * inv_n;
}

QPInstance OutputMoments::instance(std::span<const Label> labels, double mu) const {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("margin mu must be positive");
  const auto m = outputs_.rows();
  const auto n = outputs_.cols();
  if (static_cast<std::size_t>(m) != labels.size())
    throw std::invalid_argument("labels and voter outputs differ in length");

  Eigen::VectorXd y(m);
  for (Eigen::Index s = 0; s < m; ++s) {
    const Label v = labels[static_cast<std::size_t>(s)];
    if (v != 1 && v != -1) throw std::invalid_argument("labels must be -1 or +1");
    y[s] = v;
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  const double inv_n = 1.0 / static_cast<double>(n);

  QPInstance qp;
  qp.second_moment = second_moment_;
  qp.linear_term = linear_term_;
  qp.first_moment.noalias() = outputs_.transpose() * y;
  qp.first_moment *= inv_m;
  qp.mu = mu;
  qp.equality_rhs = mu / 2.0 + y.dot(row_sums_) * inv_m * inv_n / 2.0;
  return qp;
}

QPInstance assemble_from_outputs(const Eigen::MatrixXd& outputs, std::span<const Label> labels,
                                 double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("margin mu must be positive");
  return OutputMoments(outputs).instance(labels, mu);
}

QPInstance assemble(const LabeledSample& sample, const VoterSet& voters, double mu) {
  if (sample.dim() != voters.dim()) throw SampleError("sample and voters differ in dimension");
  return assemble_from_outputs(voters.evaluate_matrix(sample.points()), sample.labels(), mu);
}

double QPInstance::neutral_rhs() const {
  return first_moment.sum() / (2.0 * static_cast<double>(size()));
}

QPInstance QPInstance::with_margin(double new_mu) const {
  if (!(new_mu > 0.0) || !std::isfinite(new_mu))
    throw std::invalid_argument("margin mu must be positive");
  QPInstance out = *this;
  out.mu = new_mu;
  out.equality_rhs = new_mu / 2.0 + neutral_rhs();
  return out;
}

std::pair<double, double> achievable_rhs(const QPInstance& qp) {
  const double ub = qp.upper_bound();
  double lo = 0.0, hi = 0.0;
  for (Eigen::Index j = 0; j < qp.first_moment.size(); ++j) {
    const double v = qp.first_moment[j] * ub;
    (v < 0.0 ? lo : hi) += v;
  }
  return {lo, hi};
}

double objective(const QPInstance& qp, const Eigen::VectorXd& rho) {
  return rho.dot(qp.second_moment * rho) - qp.linear_term.dot(rho);
}

double constraint_violation(const QPInstance& qp, const Eigen::VectorXd& rho) {
  return std::abs(qp.first_moment.dot(rho) - qp.equality_rhs);
}

double kkt_residual(const QPInstance& qp, const Eigen::VectorXd& rho) {
  const Eigen::VectorXd g = 2.0 * (qp.second_moment * rho) - qp.linear_term;
  const Eigen::VectorXd& m = qp.first_moment;
  const double ub = qp.upper_bound();
  const double edge = 1e-12 * ub;

  auto violation = [&](double nu) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      const double r = g[j] - nu * m[j];
      double v;
      if (rho[j] <= edge)
        v = std::max(0.0, -r);
      else if (rho[j] >= ub - edge)
        v = std::max(0.0, r);
      else
        v = std::abs(r);
      worst = std::max(worst, v);
    }
    return worst;
  };

  // The optimal multiplier lies between the extreme ratios g_j / m_j.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    if (m[j] == 0.0) continue;
    const double ratio = g[j] / m[j];
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  if (!(lo <= hi)) return violation(0.0);
  for (int it = 0; it < 300 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double a = lo + (hi - lo) / 3.0;
    const double b = hi - (hi - lo) / 3.0;
    if (violation(a) <= violation(b))
      hi = b;
    else
      lo = a;
  }
  return std::min({violation(lo), violation(hi), violation(0.5 * (lo + hi))});
}

std::string to_csv(const QPInstance& qp) {
  std::ostringstream os;
  os.precision(17);
  os << "# mu=" << qp.mu << " c=" << qp.equality_rhs << "\n";
  os << "j,m,A";
  for (std::size_t k = 0; k < qp.size(); ++k) os << ",M" << k;
  os << "\n";
  for (Eigen::Index j = 0; j < qp.first_moment.size(); ++j) {
    os << j << ',' << qp.first_moment[j] << ',' << qp.linear_term[j];
    for (Eigen::Index k = 0; k < qp.second_moment.cols(); ++k) os << ',' << qp.second_moment(j, k);
    os << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------

Eigen::VectorXd Posterior::signed_weights() const {
  const double inv_n = 1.0 / static_cast<double>(weights.size());
  return (2.0 * weights.array() - inv_n).matrix();
}

Posterior Posterior::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("posterior over zero voters");
  return Posterior{Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 0.5 / static_cast<double>(n))};
}

Eigen::VectorXd scores_from_outputs(const Eigen::MatrixXd& outputs, const Posterior& posterior) {
  if (static_cast<std::size_t>(outputs.cols()) != posterior.size())
    throw std::invalid_argument("voter outputs and posterior differ in size");
  return outputs * posterior.signed_weights();
}

MajorityVote::MajorityVote(VoterSet voters, Posterior posterior)
    : voters_(std::move(voters)), posterior_(std::move(posterior)) {
  if (voters_.size() != posterior_.size())
    throw std::invalid_argument("posterior size does not match the voter set");
  signed_ = posterior_.signed_weights();
}

double MajorityVote::score(const PointRef& x) const { return voters_.evaluate(x).dot(signed_); }

Label MajorityVote::predict(const PointRef& x) const { return score(x) > 0.0 ? 1 : -1; }

Eigen::VectorXd MajorityVote::scores(const PointMatrix& points) const {
  return voters_.evaluate_matrix(points) * signed_;
}

std::vector<Label> MajorityVote::predict_all(const PointMatrix& points) const {
  const Eigen::VectorXd s = scores(points);
  std::vector<Label> out(static_cast<std::size_t>(s.size()));
  for (Eigen::Index i = 0; i < s.size(); ++i) out[static_cast<std::size_t>(i)] = s[i] > 0.0 ? 1 : -1;
  return out;
}

}  // namespace pvmincq
