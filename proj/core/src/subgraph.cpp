#include "lgcf/subgraph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>

#include "lgcf/errors.hpp"

namespace lgcf {

void WalkConfig::validate() const {
  if (!(restart_prob >= 0.0 && restart_prob <= 1.0)) {
    throw DomainError("restart_prob must lie in [0, 1]");
  }
  if (walk_len < 1) throw DomainError("walk_len must be at least 1");
  if (max_nodes < 2) throw DomainError("max_nodes must be at least 2");
}

std::size_t LocalizedGraph::edge_count() const noexcept {
  std::size_t twice = 0;
  for (auto a : adj) twice += a;
  return twice / 2;
}

std::vector<NodeId> rwr_trace(const BipartiteGraph& graph, NodeId start, const WalkConfig& cfg,
                              Rng& rng) {
  std::vector<NodeId> trace{start};
  if (graph.degree(start) == 0) return trace;
  std::unordered_set<NodeId> seen{start};
  NodeId current = start;
  for (std::size_t step = 0; step < cfg.walk_len; ++step) {
    if (uniform01(rng) < cfg.restart_prob) {
      current = start;
      continue;
    }
    auto nb = graph.neighbors(current);
    current = nb[uniform_index(rng, nb.size())];
    if (seen.insert(current).second) trace.push_back(current);
  }
  return trace;
}

std::vector<NodeId> union_nodes(std::span<const NodeId> from_user, std::span<const NodeId> from_item) {
  std::vector<NodeId> out;
  out.reserve(from_user.size() + from_item.size());
  std::unordered_set<NodeId> seen;
  for (auto v : from_user) {
    if (seen.insert(v).second) out.push_back(v);
  }
  for (auto v : from_item) {
    if (seen.insert(v).second) out.push_back(v);
  }
  return out;
}

LocalizedGraph induce_subgraph(const BipartiteGraph& graph, std::span<const NodeId> nodes,
                               NodeId user, NodeId item, bool remove_target_edge,
                               std::size_t max_nodes) {
  if (!graph.is_user(user) || !graph.is_item(item)) {
    throw DomainError("target pair must be (user, item)");
  }
  LocalizedGraph lg;
  lg.user = user;
  lg.item = item;
  lg.target_removed = remove_target_edge;
  lg.nodes.reserve(std::min(nodes.size() + 2, max_nodes));
  lg.nodes.push_back(user);
  lg.nodes.push_back(item);
  for (auto v : nodes) {
    if (lg.nodes.size() >= std::max<std::size_t>(max_nodes, 2)) break;
    if (v == user || v == item) continue;
    if (std::find(lg.nodes.begin() + 2, lg.nodes.end(), v) != lg.nodes.end()) continue;
    lg.nodes.push_back(v);
  }

  const std::size_t k = lg.nodes.size();
  lg.is_user.resize(k);
  for (std::size_t p = 0; p < k; ++p) lg.is_user[p] = graph.is_user(lg.nodes[p]) ? 1 : 0;
  lg.adj.assign(k * k, 0);
  lg.labels.assign(k, 0);
  for (std::size_t p = 0; p < k; ++p) {
    if (!lg.is_user[p]) continue;
    for (std::size_t q = 0; q < k; ++q) {
      if (lg.is_user[q]) continue;
      if (remove_target_edge && p == 0 && q == 1) continue;
      if (graph.has_edge(lg.nodes[p], lg.nodes[q])) lg.adj[p * k + q] = lg.adj[q * k + p] = 1;
    }
  }
  return lg;
}

LocalizedGraph extract(const BipartiteGraph& graph, NodeId user, NodeId item,
                       const WalkConfig& cfg, Rng& rng) {
  if (!graph.is_user(user) || !graph.is_item(item)) {
    throw DomainError("extract needs a (user, item) pair");
  }
  const auto from_user = rwr_trace(graph, user, cfg, rng);
  const auto from_item = rwr_trace(graph, item, cfg, rng);
  const auto nodes = union_nodes(from_user, from_item);
  return induce_subgraph(graph, nodes, user, item, cfg.remove_target_edge, cfg.max_nodes);
}

void write_dump(std::ostream& out, const LocalizedGraph& lg) {
  const std::size_t k = lg.size();
  out << k << ' ' << lg.user << ' ' << lg.item << ' ' << (lg.target_removed ? 1 : 0) << '\n';
  for (std::size_t p = 0; p < k; ++p) {
    out << p << ' ' << lg.nodes[p] << ' ' << (lg.is_user[p] ? 'u' : 'i') << ' ' << lg.labels[p]
        << '\n';
  }
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t q = p + 1; q < k; ++q) {
      if (lg.edge(p, q)) out << p << ' ' << q << '\n';
    }
  }
}

LocalizedGraph read_dump(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw ParseError(lineno, "missing dump header");
  std::istringstream header(line);
  std::size_t k = 0;
  int removed = 0;
  LocalizedGraph lg;
  if (!(header >> k >> lg.user >> lg.item >> removed) || k < 2) {
    throw ParseError(lineno, "expected \"k u i removed_flag\"");
  }
  lg.target_removed = removed != 0;
  lg.nodes.resize(k);
  lg.is_user.resize(k);
  lg.labels.resize(k);
  lg.adj.assign(k * k, 0);
  for (std::size_t p = 0; p < k; ++p) {
    ++lineno;
    if (!std::getline(in, line)) throw ParseError(lineno, "truncated node section");
    std::istringstream row(line);
    std::size_t pos = 0;
    char side = 0;
    if (!(row >> pos >> lg.nodes[p] >> side >> lg.labels[p]) || pos != p ||
        (side != 'u' && side != 'i')) {
      throw ParseError(lineno, "expected \"pos global_id side label\"");
    }
    lg.is_user[p] = side == 'u' ? 1 : 0;
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::size_t p = 0, q = 0;
    if (!(row >> p >> q) || p >= k || q >= k || p == q) throw ParseError(lineno, "bad edge line");
    lg.adj[p * k + q] = lg.adj[q * k + p] = 1;
  }
  return lg;
}

}  // namespace lgcf
