#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lgcf/graph.hpp"

namespace lgcf {

enum class SplitKind { Normal, Sparse, SparsityLevel };

std::string to_string(SplitKind kind);

// Disjoint train/validation/test partition of a graph's edges. Every edge
// list is sorted.
struct SplitSpec {
  EdgeList train;
  EdgeList val;
  EdgeList test;
  std::uint64_t seed = 0;
  SplitKind kind = SplitKind::Normal;
  int level = 1;  // SparsityLevel only, 1 = full training set
  std::size_t num_users = 0;
  std::size_t num_items = 0;
};

// Holds out round((1 - train_frac) * |E|) edges in random order, skipping any
// edge whose removal would leave an endpoint without a training edge. The
// holdout alternates between validation and test, validation first.
SplitSpec normal_split(const BipartiteGraph& graph, double train_frac, std::uint64_t seed);

// Holds out every edge it can: a single random-order pass removes an edge
// whenever both endpoints keep another training edge. The result is maximal
// (no further edge can move) but not necessarily maximum.
SplitSpec sparse_split(const BipartiteGraph& graph, std::uint64_t seed);

struct NecessarySplit {
  EdgeList necessary;   // edge cover of every non-isolated node
  EdgeList additional;  // remaining edges in removal order
};

// Greedy edge cover: first a random maximal matching, then one edge for each
// node still uncovered.
NecessarySplit necessary_edges(const BipartiteGraph& train_graph, std::uint64_t seed);

// One training edge set per fraction f: the necessary set plus the additional
// set with its first round(f * |additional|) edges removed. For ascending
// fractions the sets are nested.
std::vector<EdgeList> sparsity_levels(const BipartiteGraph& train_graph,
                                      std::span<const double> fractions, std::uint64_t seed);

// Same holdout, training edges replaced by one sparsity level.
SplitSpec with_training_level(const SplitSpec& base, EdgeList train, int level);

// Throws DomainError naming the first broken invariant. The union check only
// applies to Normal and Sparse splits.
void validate_split(const BipartiteGraph& graph, const SplitSpec& split);

BipartiteGraph training_graph(const SplitSpec& split);

// train.tsv / val.tsv / test.tsv ("u<TAB>i", global ids) plus split.meta.
void save_split(const std::string& dir, const SplitSpec& split);
SplitSpec load_split(const std::string& dir);

}  // namespace lgcf
