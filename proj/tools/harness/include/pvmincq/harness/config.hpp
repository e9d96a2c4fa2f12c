#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "pvmincq/dataset.hpp"

namespace pvmincq::harness {

enum class Method { mincq, nn_mincq, pv_mincq };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);   // throws ConfigError

enum class PlotPolicy { none, first_seed, all };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One column of the results table.
struct ShiftCase {
  std::string name;    ///< "rot20", ..., "trans"
  ShiftSpec shift;     ///< rotation centre is filled in per run (source centroid)
};

struct BenchmarkConfig {
  // data
  std::size_t source_positives = 150;
  std::size_t source_negatives = 150;
  std::size_t target_positives = 150;
  std::size_t target_negatives = 150;
  std::size_t test_positives = 750;
  std::size_t test_negatives = 750;
  double noise_sd = 0.05;

  // shifts
  std::vector<double> rotations{20, 30, 40, 50, 60, 70, 80};
  std::optional<Eigen::Vector2d> translation = Eigen::Vector2d(1.0, -0.5);

  // seeds
  std::uint64_t first_seed = 1;
  std::size_t seed_count = 10;

  // grid
  std::vector<double> mus{1e-4, 1e-3, 1e-2, 1e-1};
  std::vector<double> gammas{0.1, 0.5, 1.0, 2.0, 5.0};
  std::vector<double> eps_quantiles{0.05, 0.10, 0.25, 0.50};
  std::vector<std::size_t> neighbors{1, 3, 5, 7};
  std::size_t folds = 5;
  bool reduced_source_matching = true;

  // run
  std::vector<Method> methods{Method::mincq, Method::nn_mincq, Method::pv_mincq};
  std::filesystem::path out_dir = "pvmincq-out";
  std::size_t jobs = 1;
  PlotPolicy plots = PlotPolicy::first_seed;

  std::vector<ShiftCase> shift_cases() const;
  std::vector<std::uint64_t> seeds() const;
  void validate() const;   // throws ConfigError
};

/// Reads an INI-style file: [section] headers, "key = value" lines, lists
/// separated by blanks. Unknown sections or keys are errors. Missing keys
/// keep their defaults.
BenchmarkConfig load_config(const std::filesystem::path& path);
BenchmarkConfig parse_config(const std::string& text);

/// The defaults rendered in the same format.
std::string render_config(const BenchmarkConfig& config);

/// Looks up a shift by column name ("rot20", "trans", or "rot<deg>" for any angle).
ShiftCase find_shift(const BenchmarkConfig& config, std::string_view name);

}  // namespace pvmincq::harness
