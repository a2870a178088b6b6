#include "lgcf/embedding.hpp"

#include <cmath>

#include "lgcf/errors.hpp"
#include "lgcf/gnn.hpp"

namespace lgcf {

EmbeddingTable EmbeddingTable::zeros(std::size_t num_users, std::size_t num_items,
                                     std::size_t dim) {
  return {Matrix(num_users, dim), Matrix(num_items, dim)};
}

EmbeddingTable EmbeddingTable::normal(std::size_t num_users, std::size_t num_items,
                                      std::size_t dim, double stddev, Rng& rng) {
  auto t = zeros(num_users, num_items, dim);
  std::normal_distribution<double> dist(0.0, stddev);
  for (auto& v : t.users.values()) v = dist(rng);
  for (auto& v : t.items.values()) v = dist(rng);
  return t;
}

std::span<double> EmbeddingTable::row(NodeId v) {
  const auto n = static_cast<NodeId>(users.rows());
  return v < n ? users.row(v) : items.row(v - n);
}

std::span<const double> EmbeddingTable::row(NodeId v) const {
  const auto n = static_cast<NodeId>(users.rows());
  return v < n ? users.row(v) : items.row(v - n);
}

void EmbeddingTable::validate() const {
  if (users.cols() < 1 || users.cols() != items.cols()) {
    throw ContractViolation("embedding tables need a common dimension d >= 1");
  }
  for (double v : users.values()) {
    if (!std::isfinite(v)) throw ContractViolation("non-finite user embedding");
  }
  for (double v : items.values()) {
    if (!std::isfinite(v)) throw ContractViolation("non-finite item embedding");
  }
}

double mf_score(const EmbeddingTable& table, NodeId user, NodeId item) {
  return dot(table.row(user), table.row(item));
}

EmbeddingTable lightgcn_propagate(const BipartiteGraph& graph, const EmbeddingTable& table,
                                  std::size_t layers) {
  if (table.num_users() != graph.num_users() || table.num_items() != graph.num_items()) {
    throw ContractViolation("embedding table does not match the graph");
  }
  const std::size_t nodes = graph.num_nodes();
  const std::size_t d = table.dim();
  std::vector<double> inv_sqrt(nodes, 0.0);
  for (NodeId v = 0; v < nodes; ++v) {
    if (graph.degree(v) > 0) inv_sqrt[v] = 1.0 / std::sqrt(static_cast<double>(graph.degree(v)));
  }

  EmbeddingTable current = table;
  EmbeddingTable sum = table;
  for (std::size_t layer = 0; layer < layers; ++layer) {
    auto next = EmbeddingTable::zeros(table.num_users(), table.num_items(), d);
    for (NodeId v = 0; v < nodes; ++v) {
      auto out = next.row(v);
      for (NodeId w : graph.neighbors(v)) {
        const double c = inv_sqrt[v] * inv_sqrt[w];
        auto in = current.row(w);
        for (std::size_t j = 0; j < d; ++j) out[j] += c * in[j];
      }
    }
    axpy(1.0, next.users, sum.users);
    axpy(1.0, next.items, sum.items);
    current = std::move(next);
  }
  const double inv = 1.0 / static_cast<double>(layers + 1);
  for (auto& v : sum.users.values()) v *= inv;
  for (auto& v : sum.items.values()) v *= inv;
  return sum;
}

}  // namespace lgcf
