#include "pvmincq/matching.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace pvmincq {

double euclidean_distance(const PointRef& a, const PointRef& b) { return (a - b).norm(); }

std::size_t BipartiteGraph::edge_count() const {
  std::size_t e = 0;
  for (const auto& adj : adjacency) e += adj.size();
  return e;
}

BipartiteGraph neighbourhood_graph(const PointMatrix& source, const PointMatrix& target, double eps,
                                   const Distance& distance) {
  if (!(eps > 0.0)) throw std::invalid_argument("matching radius eps must be positive");
  if (source.cols() == 0 || target.cols() == 0) throw SampleError("matching needs non-empty samples");
  if (source.rows() != target.rows()) throw SampleError("source and target differ in dimension");

  BipartiteGraph g;
  g.left = static_cast<std::size_t>(source.cols());
  g.right = static_cast<std::size_t>(target.cols());
  g.adjacency.resize(g.left);
  const double eps_sq = eps * eps;
  for (Eigen::Index s = 0; s < source.cols(); ++s) {
    auto& adj = g.adjacency[static_cast<std::size_t>(s)];
    for (Eigen::Index t = 0; t < target.cols(); ++t) {
      const bool edge = distance ? distance(source.col(s), target.col(t)) <= eps
                                 : (source.col(s) - target.col(t)).squaredNorm() <= eps_sq;
      if (edge) adj.push_back(static_cast<std::size_t>(t));
    }
  }
  return g;
}

std::vector<std::size_t> maximum_matching(const BipartiteGraph& graph) {
  const std::size_t L = graph.left, R = graph.right;
  constexpr std::size_t inf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> match_left(L, unmatched), match_right(R, unmatched), dist(L);

  auto bfs = [&] {
    std::queue<std::size_t> q;
    bool found = false;
    for (std::size_t s = 0; s < L; ++s) {
      if (match_left[s] == unmatched) {
        dist[s] = 0;
        q.push(s);
      } else {
        dist[s] = inf;
      }
    }
    while (!q.empty()) {
      const std::size_t s = q.front();
      q.pop();
      for (std::size_t t : graph.adjacency[s]) {
        const std::size_t next = match_right[t];
        if (next == unmatched) {
          found = true;
        } else if (dist[next] == inf) {
          dist[next] = dist[s] + 1;
          q.push(next);
        }
      }
    }
    return found;
  };

  // Iterative DFS along the BFS layering; `cursor` keeps each vertex's
  // position in its adjacency list across the phase.
  std::vector<std::size_t> cursor(L);
  std::vector<std::size_t> stack;
  auto augment_from = [&](std::size_t root) {
    stack.assign(1, root);
    while (!stack.empty()) {
      const std::size_t s = stack.back();
      const auto& adj = graph.adjacency[s];
      bool advanced = false;
      while (cursor[s] < adj.size()) {
        const std::size_t t = adj[cursor[s]];
        const std::size_t next = match_right[t];
        if (next == unmatched) {
          // Flip the alternating path recorded on the stack.
          for (std::size_t k = stack.size(); k-- > 0;) {
            const std::size_t u = stack[k];
            const std::size_t v = graph.adjacency[u][cursor[u]];
            match_left[u] = v;
            match_right[v] = u;
          }
          return true;
        }
        if (dist[next] == dist[s] + 1) {
          stack.push_back(next);
          advanced = true;
          break;
        }
        ++cursor[s];
      }
      if (!advanced) {
        dist[s] = inf;
        stack.pop_back();
        if (!stack.empty()) ++cursor[stack.back()];
      }
    }
    return false;
  };

  while (bfs()) {
    std::fill(cursor.begin(), cursor.end(), 0);
    for (std::size_t s = 0; s < L; ++s)
      if (match_left[s] == unmatched) augment_from(s);
  }
  return match_left;
}

Matching compute_matching(const PointMatrix& source, const PointMatrix& target, double eps,
                          const Distance& distance) {
  const BipartiteGraph graph = neighbourhood_graph(source, target, eps, distance);
  const std::vector<std::size_t> match = maximum_matching(graph);

  Matching out;
  out.eps = eps;
  out.source_size = graph.left;
  out.target_size = graph.right;
  for (std::size_t s = 0; s < match.size(); ++s)
    if (match[s] != unmatched) out.pairs.emplace_back(s, match[s]);

  const double matched = static_cast<double>(out.pairs.size());
  const double ms = static_cast<double>(out.source_size);
  const double mt = static_cast<double>(out.target_size);
  out.pv = 0.5 * ((ms - matched) / ms + (mt - matched) / mt);
  return out;
}

double pv_estimate(const PointMatrix& source, const PointMatrix& target, double eps,
                   const Distance& distance) {
  return compute_matching(source, target, eps, distance).pv;
}

}  // namespace pvmincq
