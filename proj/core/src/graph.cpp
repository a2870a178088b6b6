#include "lgcf/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "lgcf/errors.hpp"

namespace lgcf {

bool BipartiteGraph::has_edge(NodeId a, NodeId b) const noexcept {
  if (a >= num_nodes() || b >= num_nodes()) return false;
  // Search the shorter list.
  if (degree(a) > degree(b)) std::swap(a, b);
  auto nb = neighbors(a);
  return std::binary_search(nb.begin(), nb.end(), b);
}

EdgeList BipartiteGraph::edges() const {
  EdgeList out;
  out.reserve(edge_count());
  for (NodeId u = 0; u < num_users_; ++u) {
    for (NodeId i : neighbors(u)) out.push_back({u, i});
  }
  return out;
}

BipartiteGraph build_graph(const EdgeList& edges, std::size_t num_users, std::size_t num_items) {
  const std::size_t n = num_users + num_items;
  std::vector<std::size_t> degree(n, 0);
  for (const auto& e : edges) {
    if (e.user >= num_users) {
      throw DomainError("edge user endpoint " + std::to_string(e.user) + " is not a user id");
    }
    if (e.item < num_users || e.item >= n) {
      throw DomainError("edge item endpoint " + std::to_string(e.item) + " is not an item id");
    }
    ++degree[e.user];
    ++degree[e.item];
  }

  BipartiteGraph g;
  g.num_users_ = num_users;
  g.num_items_ = num_items;
  g.offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) g.offsets_[v + 1] = g.offsets_[v] + degree[v];
  g.neighbors_.resize(g.offsets_[n]);

  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& e : edges) {
    g.neighbors_[cursor[e.user]++] = e.item;
    g.neighbors_[cursor[e.item]++] = e.user;
  }
  for (std::size_t v = 0; v < n; ++v) {
    auto first = g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]);
    auto last = g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]);
    std::sort(first, last);
    if (auto dup = std::adjacent_find(first, last); dup != last) {
      throw DomainError("duplicate edge between " + std::to_string(v) + " and " +
                        std::to_string(*dup));
    }
  }
  return g;
}

double density(const BipartiteGraph& graph) {
  if (graph.num_users() == 0 || graph.num_items() == 0) {
    throw DomainError("density is undefined without users and items");
  }
  return static_cast<double>(graph.edge_count()) /
         (static_cast<double>(graph.num_users()) * static_cast<double>(graph.num_items()));
}

void write_graph(std::ostream& out, const BipartiteGraph& graph) {
  out << "# lgcf-graph users=" << graph.num_users() << " items=" << graph.num_items()
      << " edges=" << graph.edge_count() << '\n';
  for (const auto& e : graph.edges()) out << e.user << '\t' << e.item << '\n';
}

void save_graph(const std::string& path, const BipartiteGraph& graph) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write graph file " + path);
  write_graph(out, graph);
}

BipartiteGraph read_graph(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing lgcf-graph header");
  std::size_t users = 0, items = 0, edges = 0;
  if (std::sscanf(line.c_str(), "# lgcf-graph users=%zu items=%zu edges=%zu", &users, &items,
                  &edges) != 3) {
    throw ParseError(1, "malformed lgcf-graph header");
  }
  EdgeList list;
  list.reserve(edges);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    long long u = -1, i = -1;
    if (!(row >> u >> i) || u < 0 || i < 0) throw ParseError(lineno, "expected \"u<TAB>i\"");
    list.push_back({static_cast<NodeId>(u), static_cast<NodeId>(i)});
  }
  if (list.size() != edges) {
    throw ParseError(lineno, "header declares " + std::to_string(edges) + " edges, found " +
                                 std::to_string(list.size()));
  }
  return build_graph(list, users, items);
}

BipartiteGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open graph file " + path);
  return read_graph(in);
}

}  // namespace lgcf
