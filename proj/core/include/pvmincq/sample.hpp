#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace pvmincq {

/// A point of the input space. Samples store points as the columns of a
/// d x m matrix so that every point is contiguous in memory.
using Point = Eigen::VectorXd;
using PointMatrix = Eigen::MatrixXd;
using PointRef = Eigen::Ref<const Eigen::VectorXd>;

/// Binary labels are stored as plain ints restricted to {-1, +1}.
using Label = int;

class SampleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnlabeledSample {
 public:
  UnlabeledSample() = default;
  explicit UnlabeledSample(PointMatrix points);

  const PointMatrix& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(points_.cols()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(points_.rows()); }
  auto point(std::size_t i) const { return points_.col(static_cast<Eigen::Index>(i)); }

  friend bool operator==(const UnlabeledSample& a, const UnlabeledSample& b) {
    return a.points_.rows() == b.points_.rows() && a.points_.cols() == b.points_.cols() &&
           a.points_ == b.points_;
  }

 private:
  PointMatrix points_;
};

class LabeledSample {
 public:
  LabeledSample() = default;
  LabeledSample(PointMatrix points, std::vector<Label> labels);

  const PointMatrix& points() const noexcept { return points_; }
  const std::vector<Label>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(points_.rows()); }
  auto point(std::size_t i) const { return points_.col(static_cast<Eigen::Index>(i)); }
  Label label(std::size_t i) const { return labels_[i]; }

  std::size_t count(Label y) const;
  UnlabeledSample unlabeled() const { return UnlabeledSample(points_); }

  /// Sub-sample made of the given indices, in the given order.
  LabeledSample subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const LabeledSample& a, const LabeledSample& b) {
    return a.points_.rows() == b.points_.rows() && a.points_.cols() == b.points_.cols() &&
           a.points_ == b.points_ && a.labels_ == b.labels_;
  }

 private:
  PointMatrix points_;
  std::vector<Label> labels_;
};

/// Columns of `points` selected by `indices`.
PointMatrix select_columns(const PointMatrix& points, std::span<const std::size_t> indices);

}  // namespace pvmincq
