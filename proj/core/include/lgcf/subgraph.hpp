#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "lgcf/graph.hpp"
#include "lgcf/random.hpp"

namespace lgcf {

struct WalkConfig {
  double restart_prob = 0.15;
  std::size_t walk_len = 50;   // steps per seed node
  std::size_t max_nodes = 50;  // cap on localized-graph size, targets included
  bool remove_target_edge = true;

  void validate() const;  // throws DomainError
};

// Subgraph around one (user, item) pair. Position 0 holds the user and
// position 1 the item; the remaining nodes follow in first-visit order.
struct LocalizedGraph {
  std::vector<NodeId> nodes;
  std::vector<char> is_user;     // per position
  std::vector<std::uint8_t> adj;  // k * k, symmetric 0/1, zero diagonal
  std::vector<int> labels;        // filled by label_graph
  NodeId user = 0;
  NodeId item = 0;
  bool target_removed = false;

  std::size_t size() const noexcept { return nodes.size(); }
  bool edge(std::size_t p, std::size_t q) const noexcept { return adj[p * nodes.size() + q] != 0; }
  std::size_t edge_count() const noexcept;
};

// Visited nodes in first-visit order; always starts with `start`.
std::vector<NodeId> rwr_trace(const BipartiteGraph& graph, NodeId start, const WalkConfig& cfg,
                              Rng& rng);

std::vector<NodeId> union_nodes(std::span<const NodeId> from_user, std::span<const NodeId> from_item);

LocalizedGraph induce_subgraph(const BipartiteGraph& graph, std::span<const NodeId> nodes,
                               NodeId user, NodeId item, bool remove_target_edge,
                               std::size_t max_nodes = std::numeric_limits<std::size_t>::max());

// Trace from the user, then from the item (same stream), union, induce.
LocalizedGraph extract(const BipartiteGraph& graph, NodeId user, NodeId item,
                       const WalkConfig& cfg, Rng& rng);

// Stream owned by one extraction, derived from (seed, pair, epoch).
inline Rng extraction_stream(std::uint64_t seed, NodeId user, NodeId item, std::uint64_t epoch) {
  return make_stream({seed, stream::kExtract, user, item, epoch});
}

// Text dump: "k u i removed_flag", then k lines "pos global_id side label"
// (side is 'u' or 'i'), then one "p q" line per edge with p < q.
void write_dump(std::ostream& out, const LocalizedGraph& lg);
LocalizedGraph read_dump(std::istream& in);

}  // namespace lgcf
