#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "pvmincq/harness/benchmark.hpp"

namespace pvmincq::harness {

/// Marker for a cell whose runs all self-labeled every target point alike.
inline constexpr const char* no_result_marker = "⌀";

struct TableCell {
  std::optional<double> mean_accuracy;   ///< over runs with an accuracy
  std::size_t runs = 0;
  std::size_t degenerate = 0;
  std::size_t failed = 0;
};

TableCell table_cell(const BenchmarkSummary& summary, std::size_t shift, std::size_t method);

/// Rows are methods, columns shifts, entries mean accuracy in percent.
std::string table_csv(const BenchmarkSummary& summary);

/// One row per run.
std::string per_seed_csv(const BenchmarkSummary& summary);

nlohmann::json grid_cell_json(const GridCell& cell);
nlohmann::json report_json(const ValidationReport& report);
nlohmann::json run_json(const RunResult& result);

/// One row per grid cell.
std::string validation_csv(const ValidationReport& report);
nlohmann::json chosen_json(const ValidationReport& report);

std::filesystem::path run_json_path(const std::filesystem::path& out, const RunResult& result);
std::filesystem::path plot_path(const std::filesystem::path& out, const RunResult& result);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomically(const std::filesystem::path& path, const std::string& content);

/// table.csv, per_seed.csv, config.ini and summary.json under config.out_dir.
void write_outputs(const BenchmarkSummary& summary, const BenchmarkConfig& config);

}  // namespace pvmincq::harness
