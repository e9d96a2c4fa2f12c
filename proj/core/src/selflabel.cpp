#include "pvmincq/selflabel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pvmincq {

namespace {

void check_matching(const Matching& matching, std::size_t ms, std::size_t mt) {
  for (const auto& [s, t] : matching.pairs)
    if (s >= ms || t >= mt) throw std::out_of_range("matching index outside the samples");
}

}  // namespace

std::vector<SelfLabeledPair> transferred_labels(const LabeledSample& source, const Matching& matching) {
  std::vector<SelfLabeledPair> out;
  out.reserve(matching.size());
  for (const auto& [s, t] : matching.pairs) {
    if (s >= source.size()) throw std::out_of_range("matching index outside the source sample");
    out.push_back({t, s, source.label(s)});
  }
  std::sort(out.begin(), out.end(),
            [](const SelfLabeledPair& a, const SelfLabeledPair& b) { return a.target_index < b.target_index; });
  return out;
}

LabeledSample pv_self_label(const LabeledSample& source, const UnlabeledSample& target,
                            const Matching& matching) {
  if (matching.empty()) throw EmptySelfLabel();
  check_matching(matching, source.size(), target.size());
  const auto pairs = transferred_labels(source, matching);
  std::vector<std::size_t> idx;
  std::vector<Label> labels;
  idx.reserve(pairs.size());
  labels.reserve(pairs.size());
  for (const auto& p : pairs) {
    idx.push_back(p.target_index);
    labels.push_back(p.transferred_label);
  }
  return LabeledSample(select_columns(target.points(), idx), std::move(labels));
}

LabeledSample nn_self_label(const LabeledSample& source, const UnlabeledSample& target, std::size_t k) {
  if (k == 0 || k > source.size()) throw std::invalid_argument("k must lie in [1, m_s]");
  if (source.dim() != target.dim()) throw SampleError("source and target differ in dimension");

  const std::size_t ms = source.size();
  std::vector<std::size_t> order(ms);
  std::vector<double> dist(ms);
  std::vector<Label> labels(target.size());
  for (std::size_t t = 0; t < target.size(); ++t) {
    const auto x = target.point(t);
    for (std::size_t s = 0; s < ms; ++s) dist[s] = (source.point(s) - x).squaredNorm();
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto closer = [&](std::size_t a, std::size_t b) {
      return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), closer);
    int vote = 0;
    for (std::size_t q = 0; q < k; ++q) vote += source.label(order[q]);
    labels[t] = vote > 0 ? 1 : vote < 0 ? -1 : source.label(order[0]);
  }
  return LabeledSample(target.points(), std::move(labels));
}

double epsilon_hat(const VoterSet& voters, const Matching& matching, const PointMatrix& source,
                   const PointMatrix& target) {
  if (matching.empty()) throw EmptySelfLabel();
  check_matching(matching, static_cast<std::size_t>(source.cols()), static_cast<std::size_t>(target.cols()));
  double worst = 0.0;
  for (const auto& [s, t] : matching.pairs) {
    const Eigen::VectorXd hs = voters.evaluate(source.col(static_cast<Eigen::Index>(s)));
    const Eigen::VectorXd ht = voters.evaluate(target.col(static_cast<Eigen::Index>(t)));
    worst = std::max(worst, (hs - ht).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace pvmincq
