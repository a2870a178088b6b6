#pragma once

#include <cstddef>
#include <span>

#include "lgcf/graph.hpp"
#include "lgcf/matrix.hpp"
#include "lgcf/random.hpp"

namespace lgcf {

// Per-node latent vectors: users (n x d) and items (m x d).
struct EmbeddingTable {
  Matrix users;
  Matrix items;

  static EmbeddingTable zeros(std::size_t num_users, std::size_t num_items, std::size_t dim);
  // N(0, stddev^2) entries.
  static EmbeddingTable normal(std::size_t num_users, std::size_t num_items, std::size_t dim,
                               double stddev, Rng& rng);

  std::size_t dim() const noexcept { return users.cols(); }
  std::size_t num_users() const noexcept { return users.rows(); }
  std::size_t num_items() const noexcept { return items.rows(); }
  std::size_t count() const noexcept { return users.size() + items.size(); }

  // Row for a global node id.
  std::span<double> row(NodeId v);
  std::span<const double> row(NodeId v) const;

  void validate() const;  // finite entries, d >= 1; throws ContractViolation
};

double mf_score(const EmbeddingTable& table, NodeId user, NodeId item);

// Mean of E^(0..K) with E^(k+1) = D^-1/2 A D^-1/2 E^(k) over the full
// bipartite adjacency. Isolated nodes contribute zero beyond E^(0).
// The operator is symmetric, so the same call maps output gradients back to
// input gradients.
EmbeddingTable lightgcn_propagate(const BipartiteGraph& graph, const EmbeddingTable& table,
                                  std::size_t layers);

}  // namespace lgcf
