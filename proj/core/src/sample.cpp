#include "pvmincq/sample.hpp"

#include <algorithm>
#include <cmath>

namespace pvmincq {

namespace {

void check_points(const PointMatrix& points) {
  if (points.cols() == 0) throw SampleError("sample must not be empty");
  if (points.rows() == 0) throw SampleError("points must have at least one coordinate");
  if (!points.allFinite()) throw SampleError("point coordinates must be finite");
}

}  // namespace

UnlabeledSample::UnlabeledSample(PointMatrix points) : points_(std::move(points)) {
  check_points(points_);
}

LabeledSample::LabeledSample(PointMatrix points, std::vector<Label> labels)
    : points_(std::move(points)), labels_(std::move(labels)) {
  check_points(points_);
  if (static_cast<std::size_t>(points_.cols()) != labels_.size())
    throw SampleError("points and labels differ in length");
  for (Label y : labels_)
    if (y != 1 && y != -1) throw SampleError("labels must be -1 or +1");
}

std::size_t LabeledSample::count(Label y) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), y));
}

LabeledSample LabeledSample::subset(std::span<const std::size_t> indices) const {
  std::vector<Label> labels;
  labels.reserve(indices.size());
  for (std::size_t i : indices) labels.push_back(labels_.at(i));
  return LabeledSample(select_columns(points_, indices), std::move(labels));
}

PointMatrix select_columns(const PointMatrix& points, std::span<const std::size_t> indices) {
  PointMatrix out(points.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= static_cast<std::size_t>(points.cols()))
      throw std::out_of_range("point index out of range");
    out.col(static_cast<Eigen::Index>(k)) = points.col(static_cast<Eigen::Index>(indices[k]));
  }
  return out;
}

}  // namespace pvmincq
