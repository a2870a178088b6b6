#pragma once

#include <cstddef>
#include <cstdint>

#include "lgcf/gnn.hpp"
#include "lgcf/gradcheck.hpp"
#include "lgcf/graph.hpp"
#include "lgcf/subgraph.hpp"

namespace lgcf {

struct InstanceConfig {
  std::size_t max_nodes = 20;  // users + items of the random source graph
  GnnShape shape{16, 8, 3, Activation::Relu};
  std::size_t embedding_dim = 4;
  std::size_t lightgcn_layers = 2;
  double edge_prob = 0.4;
};

// A random bipartite graph with a (user, positive, negative) triple whose
// localized graphs are extracted and labeled.
struct GradInstance {
  BipartiteGraph graph;
  NodeId user = 0;
  NodeId positive = 0;
  NodeId negative = 0;
  LocalizedGraph pos;
  LocalizedGraph neg;
};

GradInstance make_grad_instance(std::uint64_t seed, const InstanceConfig& cfg);

// Full BPR objective of LGCF on one instance with fresh Glorot parameters.
GradCheckReport check_lgcf_gradients(std::uint64_t seed, const InstanceConfig& cfg,
                                     const GradCheckOptions& options = {});

// LGCF-emb joint objective: GCN weights, layer-0 embeddings (through the
// LightGCN propagation) and the joint scoring vector.
GradCheckReport check_lgcf_emb_gradients(std::uint64_t seed, const InstanceConfig& cfg,
                                         const GradCheckOptions& options = {});

}  // namespace lgcf
