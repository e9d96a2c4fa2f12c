#include "pvmincq/harness/svg.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace pvmincq::harness {

namespace {

constexpr const char* positive_region = "#d6e6f5";
constexpr const char* negative_region = "#f6dada";
constexpr const char* positive_point = "#1f5fa8";
constexpr const char* negative_point = "#b8322f";

}  // namespace

std::string render_svg(const Task& task, const RunResult& result, const SvgOptions& options) {
  if (!result.vote) throw std::invalid_argument("run has no trained vote to plot");
  if (task.source.dim() != 2) throw std::invalid_argument("plots need two-dimensional samples");

  const PointMatrix& src = task.source.points();
  const PointMatrix& tgt = task.target.points();
  Eigen::Vector2d lo = src.rowwise().minCoeff().cwiseMin(tgt.rowwise().minCoeff());
  Eigen::Vector2d hi = src.rowwise().maxCoeff().cwiseMax(tgt.rowwise().maxCoeff());
  const Eigen::Vector2d pad = 0.08 * (hi - lo);
  lo -= pad;
  hi += pad;
  const double span = std::max(hi[0] - lo[0], hi[1] - lo[1]);
  hi = lo + Eigen::Vector2d::Constant(span);   // square frame keeps distances undistorted

  const double px = options.size_px;
  auto sx = [&](double x) { return (x - lo[0]) / span * px; };
  auto sy = [&](double y) { return px - (y - lo[1]) / span * px; };

  std::string out;
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n", px,
      px + 24);
  out += fmt::format("<title>{} {} seed {}</title>\n", method_name(result.method), result.shift, result.seed);
  out += "<defs><marker id=\"head\" markerWidth=\"6\" markerHeight=\"6\" refX=\"5\" refY=\"3\" orient=\"auto\">"
         "<path d=\"M0,0 L6,3 L0,6 z\" fill=\"#555\"/></marker></defs>\n";

  // Decision regions, one run-length encoded rectangle per row segment.
  const std::size_t g = options.grid;
  const double cell = px / static_cast<double>(g);
  PointMatrix centres(2, static_cast<Eigen::Index>(g * g));
  for (std::size_t r = 0; r < g; ++r)
    for (std::size_t c = 0; c < g; ++c) {
      const auto k = static_cast<Eigen::Index>(r * g + c);
      centres(0, k) = lo[0] + (static_cast<double>(c) + 0.5) / static_cast<double>(g) * span;
      centres(1, k) = hi[1] - (static_cast<double>(r) + 0.5) / static_cast<double>(g) * span;
    }
  const std::vector<Label> pred = result.vote->predict_all(centres);
  out += "<g shape-rendering=\"crispEdges\">\n";
  for (std::size_t r = 0; r < g; ++r) {
    std::size_t c = 0;
    while (c < g) {
      const Label lab = pred[r * g + c];
      std::size_t end = c + 1;
      while (end < g && pred[r * g + end] == lab) ++end;
      out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                         static_cast<double>(c) * cell, static_cast<double>(r) * cell,
                         static_cast<double>(end - c) * cell, cell, lab > 0 ? positive_region : negative_region);
      c = end;
    }
  }
  out += "</g>\n";

  if (result.matching) {
    out += "<g stroke=\"#555\" stroke-width=\"0.6\" stroke-opacity=\"0.6\">\n";
    for (const auto& [s, t] : result.matching->pairs) {
      const auto si = static_cast<Eigen::Index>(s), ti = static_cast<Eigen::Index>(t);
      out += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" marker-end=\"url(#head)\"/>\n",
                         sx(src(0, si)), sy(src(1, si)), sx(tgt(0, ti)), sy(tgt(1, ti)));
    }
    out += "</g>\n";
  }

  out += "<g>\n";
  for (std::size_t i = 0; i < task.source.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", sx(src(0, k)), sy(src(1, k)),
                       task.source.label(i) > 0 ? positive_point : negative_point);
  }
  for (std::size_t i = 0; i < task.target_truth.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out += fmt::format(
        "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"5\" height=\"5\" fill=\"none\" stroke=\"{}\" stroke-width=\"1\"/>\n",
        sx(tgt(0, k)) - 2.5, sy(tgt(1, k)) - 2.5, task.target_truth.label(i) > 0 ? positive_point : negative_point);
  }
  out += "</g>\n";

  std::string caption = fmt::format("{} {} seed {}", method_name(result.method), result.shift, result.seed);
  if (!result.error) caption += fmt::format("  accuracy {:.1f}%", 100.0 * result.accuracy);
  if (result.matching) caption += fmt::format("  eps {:.3f}  pv {:.3f}", result.matching->eps, result.matching->pv);
  out += fmt::format("<text x=\"6\" y=\"{:.0f}\" font-family=\"sans-serif\" font-size=\"13\">{}</text>\n", px + 17,
                     caption);
  out += "</svg>\n";
  return out;
}

}  // namespace pvmincq::harness
