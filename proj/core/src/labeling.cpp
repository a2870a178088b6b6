#include "lgcf/labeling.hpp"

#include <algorithm>
#include <queue>

#include "lgcf/errors.hpp"

namespace lgcf {

std::vector<int> min_distances(const LocalizedGraph& lg, std::size_t source) {
  const std::size_t k = lg.size();
  if (source >= k) throw ContractViolation("min_distances: source outside the localized graph");
  std::vector<int> dist(k, kUnreachable);
  std::queue<std::size_t> frontier;
  dist[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const auto p = frontier.front();
    frontier.pop();
    for (std::size_t q = 0; q < k; ++q) {
      if (lg.edge(p, q) && dist[q] == kUnreachable) {
        dist[q] = dist[p] + 1;
        frontier.push(q);
      }
    }
  }
  return dist;
}

int drnl_label(int du, int di) {
  if (du == 0 || di == 0) return 1;
  if (du == kUnreachable || di == kUnreachable) return 0;
  const int d = du + di;
  const int half = d / 2;
  // half^2 on odd sums; half * (half - 1) keeps even sums ordered below d + 1.
  return 1 + std::min(du, di) + half * (half + d % 2 - 1);
}

void label_graph(LocalizedGraph& lg) {
  if (lg.size() < 2) throw ContractViolation("label_graph: targets must occupy positions 0 and 1");
  const auto from_user = min_distances(lg, 0);
  const auto from_item = min_distances(lg, 1);
  lg.labels.resize(lg.size());
  for (std::size_t p = 0; p < lg.size(); ++p) lg.labels[p] = drnl_label(from_user[p], from_item[p]);
  lg.labels[0] = 1;
  lg.labels[1] = 1;
}

Matrix one_hot_features(std::span<const int> labels, const LabelEncoding& enc) {
  if (enc.label_cap < 2) throw ContractViolation("label_cap must be at least 2");
  Matrix x(labels.size(), enc.label_cap);
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const auto label = static_cast<std::size_t>(std::max(labels[j], 0));
    x(j, std::min(label, enc.label_cap - 1)) = 1.0;
  }
  return x;
}

}  // namespace lgcf
