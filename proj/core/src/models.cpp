#include "lgcf/models.hpp"

#include <algorithm>

#include "lgcf/errors.hpp"

namespace lgcf {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Lgcf:
      return "lgcf";
    case ModelKind::Mf:
      return "mf";
    case ModelKind::LightGcn:
      return "lightgcn";
    case ModelKind::LgcfEmb:
      return "lgcf-emb";
    case ModelKind::LgcfEns:
      return "lgcf-ens";
  }
  return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
  for (auto k : {ModelKind::Lgcf, ModelKind::Mf, ModelKind::LightGcn, ModelKind::LgcfEmb,
                 ModelKind::LgcfEns}) {
    if (to_string(k) == name) return k;
  }
  throw DomainError("unknown model kind " + name);
}

std::size_t param_count(ModelKind kind, const ParamShape& shape) {
  const std::size_t gnn = gnn_param_count(shape.gnn);
  const std::size_t emb = (shape.num_users + shape.num_items) * shape.embedding_dim;
  switch (kind) {
    case ModelKind::Lgcf:
      return gnn;
    case ModelKind::Mf:
    case ModelKind::LightGcn:
      return emb;
    case ModelKind::LgcfEmb:
      return gnn + emb + shape.embedding_dim + shape.gnn.hidden;
    case ModelKind::LgcfEns:
      return gnn + emb;
  }
  return 0;
}

LocalizedGraph localized_graph(const BipartiteGraph& graph, NodeId user, NodeId item,
                               const WalkConfig& cfg, std::uint64_t seed, std::uint64_t epoch) {
  Rng rng = extraction_stream(seed, user, item, epoch);
  auto lg = extract(graph, user, item, cfg, rng);
  label_graph(lg);
  return lg;
}

double lgcf_score(const BipartiteGraph& graph, NodeId user, NodeId item,
                  const GnnParameters& params, const WalkConfig& cfg, const LabelEncoding& enc,
                  Rng& rng) {
  auto lg = extract(graph, user, item, cfg, rng);
  label_graph(lg);
  return score_graph(lg, params, enc).score;
}

double joint_score(std::span<const double> pooled, std::span<const double> h_user,
                   std::span<const double> h_item, std::span<const double> joint) {
  const std::size_t d = h_user.size();
  if (h_item.size() != d || joint.size() != d + pooled.size()) {
    throw ContractViolation("joint scoring vector must have length d + h");
  }
  double logit = 0.0;
  for (std::size_t j = 0; j < d; ++j) logit += h_user[j] * h_item[j] * joint[j];
  for (std::size_t j = 0; j < pooled.size(); ++j) logit += pooled[j] * joint[d + j];
  return sigmoid(logit);
}

double lgcf_emb_score(const BipartiteGraph& graph, NodeId user, NodeId item,
                      const GnnParameters& params, const EmbeddingTable& refined,
                      std::span<const double> joint, const WalkConfig& cfg,
                      const LabelEncoding& enc, Rng& rng) {
  auto lg = extract(graph, user, item, cfg, rng);
  label_graph(lg);
  const auto scored = score_graph(lg, params, enc);
  return joint_score(scored.pooled, refined.row(user), refined.row(item), joint);
}

double lgcf_ens_score(double s_lgcf, std::span<const double> h_user,
                      std::span<const double> h_item, double lambda) {
  return s_lgcf + lambda * dot(h_user, h_item);
}

NodeId sample_negative(const BipartiteGraph& train_graph, NodeId user, Rng& rng) {
  const std::size_t m = train_graph.num_items();
  const auto nb = train_graph.neighbors(user);
  if (nb.size() >= m) throw DomainError("user " + std::to_string(user) + " interacts with every item");
  constexpr int kRetries = 64;
  for (int attempt = 0; attempt < kRetries; ++attempt) {
    const NodeId item = train_graph.item_node(uniform_index(rng, m));
    if (!std::binary_search(nb.begin(), nb.end(), item)) return item;
  }
  std::vector<NodeId> free_items;
  free_items.reserve(m - nb.size());
  for (std::size_t j = 0; j < m; ++j) {
    const NodeId item = train_graph.item_node(j);
    if (!std::binary_search(nb.begin(), nb.end(), item)) free_items.push_back(item);
  }
  return free_items[uniform_index(rng, free_items.size())];
}

ModelScorer::ModelScorer(const Model& model, const BipartiteGraph& train_graph)
    : model_(model), graph_(train_graph) {
  switch (model.kind) {
    case ModelKind::Mf:
      refined_ = model.embeddings;
      break;
    case ModelKind::LightGcn:
    case ModelKind::LgcfEmb:
    case ModelKind::LgcfEns:
      refined_ = lightgcn_propagate(graph_, model.embeddings, model.config.lightgcn_layers);
      break;
    case ModelKind::Lgcf:
      break;
  }
}

double ModelScorer::lgcf_component(NodeId user, NodeId item) const {
  const auto lg = localized_graph(graph_, user, item, model_.config.walk, model_.seed, kEvalEpoch);
  return score_graph(lg, model_.gnn, model_.config.encoding()).score;
}

double ModelScorer::embedding_component(NodeId user, NodeId item) const {
  return dot(refined_.row(user), refined_.row(item));
}

void ModelScorer::score(NodeId user, std::span<const NodeId> items, std::span<double> out) const {
  if (items.size() != out.size()) throw ContractViolation("score: output length mismatch");
  for (std::size_t j = 0; j < items.size(); ++j) {
    const NodeId item = items[j];
    switch (model_.kind) {
      case ModelKind::Lgcf:
        out[j] = lgcf_component(user, item);
        break;
      case ModelKind::Mf:
      case ModelKind::LightGcn:
        out[j] = embedding_component(user, item);
        break;
      case ModelKind::LgcfEmb: {
        const auto lg =
            localized_graph(graph_, user, item, model_.config.walk, model_.seed, kEvalEpoch);
        const auto scored = score_graph(lg, model_.gnn, model_.config.encoding());
        out[j] = joint_score(scored.pooled, refined_.row(user), refined_.row(item), model_.joint);
        break;
      }
      case ModelKind::LgcfEns:
        out[j] = lgcf_ens_score(lgcf_component(user, item), refined_.row(user),
                                refined_.row(item), model_.lambda);
        break;
    }
  }
}

double lgcf_triple(const LocalizedGraph& pos, const LocalizedGraph& neg,
                   const GnnParameters& params, const LabelEncoding& enc, GnnGradients* grads) {
  const auto sp = score_graph(pos, params, enc);
  const auto sn = score_graph(neg, params, enc);
  const auto bpr = bpr_with_grad(sp.score, sn.score);
  if (grads) {
    backward_score(sp, params, bpr.d_pos, *grads);
    backward_score(sn, params, bpr.d_neg, *grads);
  }
  return bpr.loss;
}

double embedding_triple(const EmbeddingTable& table, const Triple& t, RowGradients* rows) {
  const auto hu = table.row(t.user);
  const auto hp = table.row(t.positive);
  const auto hn = table.row(t.negative);
  const auto bpr = bpr_with_grad(dot(hu, hp), dot(hu, hn));
  if (rows) {
    const std::size_t d = hu.size();
    std::vector<double> gu(d), gp(d), gn(d);
    for (std::size_t j = 0; j < d; ++j) {
      gu[j] = bpr.d_pos * hp[j] + bpr.d_neg * hn[j];
      gp[j] = bpr.d_pos * hu[j];
      gn[j] = bpr.d_neg * hu[j];
    }
    rows->emplace_back(t.user, std::move(gu));
    rows->emplace_back(t.positive, std::move(gp));
    rows->emplace_back(t.negative, std::move(gn));
  }
  return bpr.loss;
}

namespace {

// Backward of joint_score for one candidate: d_score is dloss/dscore.
void joint_backward(const ScoredGraph& scored, double s, double d_score, NodeId user, NodeId item,
                    const GnnParameters& params, const EmbeddingTable& refined,
                    std::span<const double> joint, JointGradients& grads) {
  const double d_logit = d_score * s * (1.0 - s);
  const auto hu = refined.row(user);
  const auto hi = refined.row(item);
  const std::size_t d = hu.size();
  const std::size_t h = scored.pooled.size();
  std::vector<double> gu(d), gi(d), d_pooled(h);
  for (std::size_t j = 0; j < d; ++j) {
    grads.joint[j] += d_logit * hu[j] * hi[j];
    gu[j] = d_logit * joint[j] * hi[j];
    gi[j] = d_logit * joint[j] * hu[j];
  }
  for (std::size_t j = 0; j < h; ++j) {
    grads.joint[d + j] += d_logit * scored.pooled[j];
    d_pooled[j] = d_logit * joint[d + j];
  }
  gcn_backward(scored.gcn.cache, params, d_pooled, grads.gnn);
  grads.rows.emplace_back(user, std::move(gu));
  grads.rows.emplace_back(item, std::move(gi));
}

}  // namespace

double lgcf_emb_triple(const LocalizedGraph& pos, const LocalizedGraph& neg, const Triple& t,
                       const GnnParameters& params, const EmbeddingTable& refined,
                       std::span<const double> joint, const LabelEncoding& enc,
                       JointGradients* grads) {
  const auto sp = score_graph(pos, params, enc);
  const auto sn = score_graph(neg, params, enc);
  const double s_pos = joint_score(sp.pooled, refined.row(t.user), refined.row(t.positive), joint);
  const double s_neg = joint_score(sn.pooled, refined.row(t.user), refined.row(t.negative), joint);
  const auto bpr = bpr_with_grad(s_pos, s_neg);
  if (grads) {
    joint_backward(sp, s_pos, bpr.d_pos, t.user, t.positive, params, refined, joint, *grads);
    joint_backward(sn, s_neg, bpr.d_neg, t.user, t.negative, params, refined, joint, *grads);
  }
  return bpr.loss;
}

EmbeddingTable dense_row_gradients(const RowGradients& rows, std::size_t num_users,
                                   std::size_t num_items, std::size_t dim) {
  auto table = EmbeddingTable::zeros(num_users, num_items, dim);
  for (const auto& [node, g] : rows) {
    auto out = table.row(node);
    for (std::size_t j = 0; j < dim; ++j) out[j] += g[j];
  }
  return table;
}

}  // namespace lgcf
