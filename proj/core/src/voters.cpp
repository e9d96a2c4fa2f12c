#include "pvmincq/voters.hpp"

#include <cmath>
#include <stdexcept>

namespace pvmincq {

VoterSet VoterSet::build_from_sample(PointMatrix anchors, double gamma) {
  if (anchors.cols() == 0) throw SampleError("voter set needs at least one anchor");
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("kernel bandwidth gamma must be finite and positive");
  if (!anchors.allFinite()) throw SampleError("anchor coordinates must be finite");
  return VoterSet(std::move(anchors), gamma);
}

double VoterSet::evaluate(std::size_t j, const PointRef& x) const {
  if (x.size() != anchors_.rows()) throw SampleError("point dimension does not match voters");
  return std::exp(-gamma_ * (x - anchors_.col(static_cast<Eigen::Index>(j))).squaredNorm());
}

Eigen::VectorXd VoterSet::evaluate(const PointRef& x) const {
  if (x.size() != anchors_.rows()) throw SampleError("point dimension does not match voters");
  Eigen::VectorXd out(anchors_.cols());
  for (Eigen::Index j = 0; j < anchors_.cols(); ++j)
    out[j] = std::exp(-gamma_ * (x - anchors_.col(j)).squaredNorm());
  return out;
}

Eigen::MatrixXd VoterSet::evaluate_matrix(const PointMatrix& points) const {
  if (points.rows() != anchors_.rows()) throw SampleError("point dimension does not match voters");
  // Direct differences rather than the |x|^2 + |a|^2 - 2<x, a> expansion: a
  // point equal to an anchor must evaluate to exactly 1.
  Eigen::MatrixXd out(points.cols(), anchors_.cols());
  for (Eigen::Index j = 0; j < anchors_.cols(); ++j)
    for (Eigen::Index s = 0; s < points.cols(); ++s)
      out(s, j) = std::exp(-gamma_ * (points.col(s) - anchors_.col(j)).squaredNorm());
  return out;
}

}  // namespace pvmincq
