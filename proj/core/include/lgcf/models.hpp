#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lgcf/embedding.hpp"
#include "lgcf/evaluate.hpp"
#include "lgcf/gnn.hpp"
#include "lgcf/labeling.hpp"
#include "lgcf/subgraph.hpp"

namespace lgcf {

enum class ModelKind { Lgcf, Mf, LightGcn, LgcfEmb, LgcfEns };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

struct ModelConfig {
  GnnShape gnn;                 // gnn.feature_width doubles as the label cap
  WalkConfig walk;
  std::size_t embedding_dim = 32;
  std::size_t lightgcn_layers = 3;

  LabelEncoding encoding() const { return {gnn.feature_width}; }
};

// Trained (or freshly initialized) parameters of any model kind. Which
// members are live depends on `kind`:
//   Lgcf      gnn
//   Mf        embeddings (the factors themselves)
//   LightGcn  embeddings (layer-0 embeddings, propagated at scoring time)
//   LgcfEmb   gnn (scoring vector unused), embeddings, joint
//   LgcfEns   gnn, embeddings, lambda
struct Model {
  ModelKind kind = ModelKind::Lgcf;
  ModelConfig config;
  std::uint64_t seed = 0;  // keys the extraction streams used for scoring
  GnnParameters gnn;
  EmbeddingTable embeddings;
  std::vector<double> joint;  // LgcfEmb scoring vector, length d + h
  double lambda = 0.0;
};

struct ParamShape {
  GnnShape gnn;
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  std::size_t embedding_dim = 32;
};

// Lgcf: C*h + (L-1)*h^2 + h. Mf, LightGcn: (n+m)*d. LgcfEmb: both plus
// d + h. LgcfEns: both.
std::size_t param_count(ModelKind kind, const ParamShape& shape);

// Epoch coordinate of the extraction streams used when scoring for
// evaluation.
inline constexpr std::uint64_t kEvalEpoch = std::numeric_limits<std::uint64_t>::max();

// extract + label_graph with the stream for (seed, pair, epoch).
LocalizedGraph localized_graph(const BipartiteGraph& graph, NodeId user, NodeId item,
                               const WalkConfig& cfg, std::uint64_t seed, std::uint64_t epoch);

double lgcf_score(const BipartiteGraph& graph, NodeId user, NodeId item,
                  const GnnParameters& params, const WalkConfig& cfg, const LabelEncoding& enc,
                  Rng& rng);

// sigmoid(((h_u * h_i) || x_ui) . joint) with x_ui the pooled GCN output.
double lgcf_emb_score(const BipartiteGraph& graph, NodeId user, NodeId item,
                      const GnnParameters& params, const EmbeddingTable& refined,
                      std::span<const double> joint, const WalkConfig& cfg,
                      const LabelEncoding& enc, Rng& rng);
double joint_score(std::span<const double> pooled, std::span<const double> h_user,
                   std::span<const double> h_item, std::span<const double> joint);

// s_lgcf + lambda * (h_u . h_i)
double lgcf_ens_score(double s_lgcf, std::span<const double> h_user,
                      std::span<const double> h_item, double lambda);

// Uniform over items without a training edge to `user`: rejection sampling
// first, then a scan. Throws DomainError if the user has every item.
NodeId sample_negative(const BipartiteGraph& train_graph, NodeId user, Rng& rng);

// Evaluation-time scorer over a training graph. Holds propagated embeddings.
class ModelScorer final : public Scorer {
 public:
  ModelScorer(const Model& model, const BipartiteGraph& train_graph);

  void score(NodeId user, std::span<const NodeId> items, std::span<double> out) const override;
  std::string name() const override { return to_string(model_.kind); }

  // Component scores, exposed for ensembles and diagnostics.
  double lgcf_component(NodeId user, NodeId item) const;
  double embedding_component(NodeId user, NodeId item) const;

 private:
  const Model& model_;
  const BipartiteGraph& graph_;
  EmbeddingTable refined_;
};

// ---- per-triple objectives: BPR on (user, positive item, negative item) ----

struct Triple {
  NodeId user = 0;
  NodeId positive = 0;
  NodeId negative = 0;
};

using RowGradients = std::vector<std::pair<NodeId, std::vector<double>>>;

// BPR loss of LGCF on two labeled localized graphs; accumulates gradients
// into `grads` when given.
double lgcf_triple(const LocalizedGraph& pos, const LocalizedGraph& neg,
                   const GnnParameters& params, const LabelEncoding& enc, GnnGradients* grads);

// BPR loss of an inner-product model on `table`; appends dloss/drow entries.
double embedding_triple(const EmbeddingTable& table, const Triple& t, RowGradients* rows);

struct JointGradients {
  GnnGradients gnn;
  std::vector<double> joint;
  RowGradients rows;  // w.r.t. the propagated embeddings
};

double lgcf_emb_triple(const LocalizedGraph& pos, const LocalizedGraph& neg, const Triple& t,
                       const GnnParameters& params, const EmbeddingTable& refined,
                       std::span<const double> joint, const LabelEncoding& enc,
                       JointGradients* grads);

// Scatters row gradients into a dense table of the given shape.
EmbeddingTable dense_row_gradients(const RowGradients& rows, std::size_t num_users,
                                   std::size_t num_items, std::size_t dim);

}  // namespace lgcf
