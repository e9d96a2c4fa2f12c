#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include <Eigen/Core>

#include "pvmincq/sample.hpp"

namespace pvmincq {

/// How positions along each moon arc are drawn.
enum class ArcSampling {
  uniform,         ///< t ~ U[0, pi], the benchmark default
  evenly_spaced,   ///< t_i = pi * i / (n - 1); a single point sits at t = 0
};

/// Two interleaved half circles. The upper moon (+1) follows (cos t, sin t);
/// the lower moon (-1) follows (1 - cos t, 0.5 - sin t) for t in [0, pi].
/// Isotropic Gaussian noise of standard deviation `noise_sd` is added per
/// coordinate. Positives come first, then negatives.
LabeledSample generate_moons(std::size_t n_pos, std::size_t n_neg, double noise_sd,
                             std::uint64_t seed, ArcSampling arc = ArcSampling::uniform);

/// Anticlockwise rotation in the plane. Without an explicit center the
/// sample's own centroid is used.
struct Rotation {
  double degrees = 0.0;
  std::optional<Eigen::Vector2d> center;
};

struct Translation {
  Eigen::VectorXd offset;
};

using ShiftSpec = std::variant<Rotation, Translation>;

Eigen::VectorXd centroid(const PointMatrix& points);

PointMatrix apply_shift(const PointMatrix& points, const ShiftSpec& shift);
LabeledSample apply_shift(const LabeledSample& sample, const ShiftSpec& shift);
UnlabeledSample apply_shift(const UnlabeledSample& sample, const ShiftSpec& shift);

class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

using AnySample = std::variant<LabeledSample, UnlabeledSample>;

/// Comma separated, one point per row. An optional header row names the
/// columns; a last column named "y" holds +-1 labels. Files without a
/// header are read as unlabeled.
AnySample read_csv(const std::filesystem::path& path);
AnySample parse_csv(const std::string& text);

void write_csv(const LabeledSample& sample, const std::filesystem::path& path);
void write_csv(const UnlabeledSample& sample, const std::filesystem::path& path);
std::string to_csv(const LabeledSample& sample);
std::string to_csv(const UnlabeledSample& sample);

}  // namespace pvmincq
