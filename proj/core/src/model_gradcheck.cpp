#include "lgcf/model_gradcheck.hpp"

#include <algorithm>

#include "lgcf/embedding.hpp"
#include "lgcf/labeling.hpp"
#include "lgcf/models.hpp"
#include "lgcf/random.hpp"

namespace lgcf {

GradInstance make_grad_instance(std::uint64_t seed, const InstanceConfig& cfg) {
  Rng rng = make_stream({seed, 0x4743u});
  const std::size_t total = std::max<std::size_t>(cfg.max_nodes, 4);
  const std::size_t n = 2 + uniform_index(rng, total / 2 - 1);
  const std::size_t m = std::max<std::size_t>(2, 2 + uniform_index(rng, total - n - 1));
  const auto nu = static_cast<NodeId>(n);

  // The user keeps one non-edge (the negative) and at least one edge.
  const NodeId user = static_cast<NodeId>(uniform_index(rng, n));
  const NodeId positive = nu + static_cast<NodeId>(uniform_index(rng, m));
  NodeId negative = positive;
  while (negative == positive) negative = nu + static_cast<NodeId>(uniform_index(rng, m));

  EdgeList edges;
  for (NodeId u = 0; u < nu; ++u) {
    for (NodeId i = nu; i < nu + m; ++i) {
      if (u == user && i == negative) continue;
      if ((u == user && i == positive) || uniform01(rng) < cfg.edge_prob) edges.push_back({u, i});
    }
  }

  GradInstance inst;
  inst.graph = build_graph(edges, n, m);
  inst.user = user;
  inst.positive = positive;
  inst.negative = negative;
  WalkConfig walk;
  walk.max_nodes = total;
  walk.walk_len = 2 * total;
  inst.pos = localized_graph(inst.graph, user, positive, walk, seed, 0);
  inst.neg = localized_graph(inst.graph, user, negative, walk, seed, 0);
  return inst;
}

GradCheckReport check_lgcf_gradients(std::uint64_t seed, const InstanceConfig& cfg,
                                     const GradCheckOptions& options) {
  const auto inst = make_grad_instance(seed, cfg);
  Rng rng = make_stream({seed, stream::kInit});
  auto params = GnnParameters::init(cfg.shape, rng);
  const LabelEncoding enc{cfg.shape.feature_width};

  auto grads = GnnGradients::zeros_like(params);
  lgcf_triple(inst.pos, inst.neg, params, enc, &grads);

  const auto loss = [&] { return lgcf_triple(inst.pos, inst.neg, params, enc, nullptr); };
  const auto p = params.blocks();
  const auto g = std::as_const(grads).blocks();
  return grad_check(loss, p, g, options);
}

GradCheckReport check_lgcf_emb_gradients(std::uint64_t seed, const InstanceConfig& cfg,
                                         const GradCheckOptions& options) {
  const auto inst = make_grad_instance(seed, cfg);
  Rng rng = make_stream({seed, stream::kInit});
  auto params = GnnParameters::init(cfg.shape, rng);
  auto table = EmbeddingTable::normal(inst.graph.num_users(), inst.graph.num_items(),
                                      cfg.embedding_dim, 0.5, rng);
  std::vector<double> joint(cfg.embedding_dim + cfg.shape.hidden);
  for (auto& v : joint) v = uniform01(rng) - 0.5;
  const LabelEncoding enc{cfg.shape.feature_width};
  const Triple t{inst.user, inst.positive, inst.negative};

  JointGradients grads;
  grads.gnn = GnnGradients::zeros_like(params);
  grads.joint.assign(joint.size(), 0.0);
  const auto refined = lightgcn_propagate(inst.graph, table, cfg.lightgcn_layers);
  lgcf_emb_triple(inst.pos, inst.neg, t, params, refined, joint, enc, &grads);
  const auto table_grad = lightgcn_propagate(
      inst.graph,
      dense_row_gradients(grads.rows, inst.graph.num_users(), inst.graph.num_items(),
                          cfg.embedding_dim),
      cfg.lightgcn_layers);

  const auto loss = [&] {
    const auto r = lightgcn_propagate(inst.graph, table, cfg.lightgcn_layers);
    return lgcf_emb_triple(inst.pos, inst.neg, t, params, r, joint, enc, nullptr);
  };
  auto p = params.blocks();
  p.push_back(table.users.values());
  p.push_back(table.items.values());
  p.emplace_back(joint);
  auto g = std::as_const(grads.gnn).blocks();
  g.push_back(table_grad.users.values());
  g.push_back(table_grad.items.values());
  g.emplace_back(grads.joint);
  return grad_check(loss, p, g, options);
}

}  // namespace lgcf
