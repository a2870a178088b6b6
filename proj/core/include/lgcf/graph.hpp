#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace lgcf {

// Global node id. Users occupy [0, n), items occupy [n, n + m).
using NodeId = std::uint32_t;

struct Edge {
  NodeId user;
  NodeId item;  // global id, >= num_users

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

using EdgeList = std::vector<Edge>;

// Immutable user-item interaction graph in CSR form. Neighbor lists are
// sorted ascending and symmetric: (u, i) is listed under u and under i.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;

  std::size_t num_users() const noexcept { return num_users_; }
  std::size_t num_items() const noexcept { return num_items_; }
  std::size_t num_nodes() const noexcept { return num_users_ + num_items_; }
  std::size_t edge_count() const noexcept { return neighbors_.size() / 2; }

  bool is_user(NodeId v) const noexcept { return v < num_users_; }
  bool is_item(NodeId v) const noexcept { return v >= num_users_ && v < num_nodes(); }
  NodeId item_node(std::size_t item_index) const noexcept {
    return static_cast<NodeId>(num_users_ + item_index);
  }

  std::size_t degree(NodeId v) const noexcept { return offsets_[v + 1] - offsets_[v]; }
  std::span<const NodeId> neighbors(NodeId v) const noexcept {
    return {neighbors_.data() + offsets_[v], degree(v)};
  }
  bool has_edge(NodeId a, NodeId b) const noexcept;

  // All edges as (user, item), sorted.
  EdgeList edges() const;

 private:
  friend BipartiteGraph build_graph(const EdgeList&, std::size_t, std::size_t);

  std::size_t num_users_ = 0;
  std::size_t num_items_ = 0;
  std::vector<std::size_t> offsets_ = {0};
  std::vector<NodeId> neighbors_;
};

// Throws DomainError on an out-of-range endpoint, a user/item side mix-up,
// or a duplicate edge.
BipartiteGraph build_graph(const EdgeList& edges, std::size_t num_users, std::size_t num_items);

// edge_count / (num_users * num_items).
double density(const BipartiteGraph& graph);

// Plain-text graph container: "# lgcf-graph users=N items=M edges=E"
// followed by one "u<TAB>i" line (global ids) per edge.
void write_graph(std::ostream& out, const BipartiteGraph& graph);
void save_graph(const std::string& path, const BipartiteGraph& graph);
BipartiteGraph read_graph(std::istream& in);
BipartiteGraph load_graph(const std::string& path);

}  // namespace lgcf
