#pragma once

#include <cstddef>

#include "pvmincq/sample.hpp"

namespace pvmincq {

/// Gaussian-kernel voters h_j(x) = exp(-gamma * |x - a_j|^2), one per anchor.
/// Every output lies in (0, 1] as long as the distance stays finite.
class VoterSet {
 public:
  static VoterSet build_from_sample(PointMatrix anchors, double gamma);

  std::size_t size() const noexcept { return static_cast<std::size_t>(anchors_.cols()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(anchors_.rows()); }
  double gamma() const noexcept { return gamma_; }
  const PointMatrix& anchors() const noexcept { return anchors_; }

  double evaluate(std::size_t j, const PointRef& x) const;

  /// Outputs of all voters at x (length n).
  Eigen::VectorXd evaluate(const PointRef& x) const;

  /// H(s, j) = h_j(x_s) for the columns x_s of `points` (m x n).
  Eigen::MatrixXd evaluate_matrix(const PointMatrix& points) const;

 private:
  VoterSet(PointMatrix anchors, double gamma) : anchors_(std::move(anchors)), gamma_(gamma) {}

  PointMatrix anchors_;
  double gamma_ = 1.0;
};

}  // namespace pvmincq
