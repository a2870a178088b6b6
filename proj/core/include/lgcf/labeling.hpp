#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lgcf/matrix.hpp"
#include "lgcf/subgraph.hpp"

namespace lgcf {

inline constexpr int kUnreachable = -1;

// Breadth-first hop counts from `source` inside the localized graph;
// kUnreachable where no path exists.
std::vector<int> min_distances(const LocalizedGraph& lg, std::size_t source);

// Double-radius label from the distances to the target user and item:
//   1                                   for a target (a distance of 0)
//   1 + min(du, di) + q * (q + d % 2 - 1)   d = du + di, q = d / 2
// On odd sums (the only ones a bipartite graph produces) the last term is q^2.
//   0                                   if either distance is unreachable
int drnl_label(int du, int di);

// Fills lg.labels; positions 0 and 1 always get label 1.
void label_graph(LocalizedGraph& lg);

struct LabelEncoding {
  std::size_t label_cap = 64;  // one-hot width; labels >= cap share column cap - 1
};

// k x cap matrix, row j is one-hot at min(label_j, cap - 1).
Matrix one_hot_features(std::span<const int> labels, const LabelEncoding& enc);

}  // namespace lgcf
