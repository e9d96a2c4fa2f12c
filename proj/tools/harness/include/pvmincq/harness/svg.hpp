#pragma once

#include <cstddef>
#include <string>

#include "pvmincq/harness/benchmark.hpp"

namespace pvmincq::harness {

struct SvgOptions {
  int size_px = 600;
  std::size_t grid = 100;   ///< decision cells per axis
};

/// Scatter plot of the source (filled) and target (hollow, coloured by true
/// label) samples over the vote's decision regions, with an arrow per matched
/// pair when the run has a matching.
std::string render_svg(const Task& task, const RunResult& result, const SvgOptions& options = {});

}  // namespace pvmincq::harness
