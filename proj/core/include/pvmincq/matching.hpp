#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "pvmincq/sample.hpp"

namespace pvmincq {

using Distance = std::function<double(const PointRef&, const PointRef&)>;

double euclidean_distance(const PointRef& a, const PointRef& b);

/// A maximum matching of the eps-neighbourhood bipartite graph between a
/// source and a target point set, together with the empirical perturbed
/// variation 1/2 (unmatched_source / m_s + unmatched_target / m_t).
struct Matching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;   ///< (source, target), sorted by source
  double eps = 0.0;
  double pv = 1.0;
  std::size_t source_size = 0;
  std::size_t target_size = 0;

  std::size_t size() const noexcept { return pairs.size(); }
  bool empty() const noexcept { return pairs.empty(); }
};

/// Bipartite graph with edges (s, t) whenever d(x_s, x_t) <= eps; adjacency
/// lists are in increasing target index.
struct BipartiteGraph {
  std::size_t left = 0;
  std::size_t right = 0;
  std::vector<std::vector<std::size_t>> adjacency;

  std::size_t edge_count() const;
};

BipartiteGraph neighbourhood_graph(const PointMatrix& source, const PointMatrix& target, double eps,
                                   const Distance& distance = {});

/// Hopcroft-Karp. Returns match_left[s] = t or npos. Vertices are visited in
/// index order so the result only depends on the input order.
std::vector<std::size_t> maximum_matching(const BipartiteGraph& graph);

inline constexpr std::size_t unmatched = static_cast<std::size_t>(-1);

Matching compute_matching(const PointMatrix& source, const PointMatrix& target, double eps,
                          const Distance& distance = {});

double pv_estimate(const PointMatrix& source, const PointMatrix& target, double eps,
                   const Distance& distance = {});

}  // namespace pvmincq
