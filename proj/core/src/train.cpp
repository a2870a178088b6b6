#include "lgcf/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

#include <nlohmann/json.hpp>

#include "lgcf/errors.hpp"
#include "lgcf/parallel.hpp"

namespace lgcf {
namespace {

struct Batch {
  std::vector<Triple> triples;
  std::vector<std::size_t> positive_index;  // index into the training edge list
};

// Every trainable block of a model, in a fixed order for Adam.
std::vector<std::span<double>> model_blocks(Model& m) {
  std::vector<std::span<double>> out;
  auto add_gnn = [&] {
    for (auto b : m.gnn.blocks()) out.push_back(b);
  };
  auto add_emb = [&] {
    out.push_back(m.embeddings.users.values());
    out.push_back(m.embeddings.items.values());
  };
  switch (m.kind) {
    case ModelKind::Lgcf:
      add_gnn();
      break;
    case ModelKind::Mf:
    case ModelKind::LightGcn:
      add_emb();
      break;
    case ModelKind::LgcfEmb:
      add_gnn();
      add_emb();
      out.emplace_back(m.joint);
      break;
    case ModelKind::LgcfEns:
      throw ContractViolation("lgcf-ens is trained through its two components");
  }
  return out;
}

void add_l2(const Model& m, const std::vector<Triple>& triples, double l2, EmbeddingTable& grad) {
  if (l2 <= 0.0) return;
  std::vector<NodeId> touched;
  for (const auto& t : triples) touched.insert(touched.end(), {t.user, t.positive, t.negative});
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  for (NodeId v : touched) {
    auto g = grad.row(v);
    auto e = m.embeddings.row(v);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] += l2 * e[j];
  }
}

class Trainer {
 public:
  Trainer(ModelKind kind, const BipartiteGraph& train_graph, const SplitSpec& split,
          const TrainConfig& tc)
      : kind_(kind), graph_(train_graph), split_(split), tc_(tc) {}

  TrainResult run() {
    TrainResult result;
    Model model = init_model(kind_, graph_.num_users(), graph_.num_items(), tc_);
    AdamState adam;
    adam.config = tc_.adam;
    const auto& positives = split_.train;

    if (tc_.cache_subgraphs && uses_subgraphs()) {
      cached_.resize(positives.size());
      parallel_for(positives.size(), tc_.threads, [&](std::size_t idx) {
        cached_[idx] = localized_graph(graph_, positives[idx].user, positives[idx].item,
                                       tc_.model.walk, tc_.master_seed, 0);
      });
    }

    std::optional<Model> best;
    AdamState best_adam;
    double best_hr = -1.0;
    std::size_t stale = 0;
    std::vector<std::size_t> order(positives.size());
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 1; epoch <= tc_.epochs; ++epoch) {
      const auto start = std::chrono::steady_clock::now();
      Rng shuffle = make_stream({tc_.master_seed, stream::kShuffle, epoch});
      std::shuffle(order.begin(), order.end(), shuffle);

      double loss_sum = 0.0;
      std::size_t loss_count = 0;
      for (std::size_t lo = 0; lo < order.size(); lo += tc_.batch_size) {
        Batch batch;
        const std::size_t hi = std::min(order.size(), lo + tc_.batch_size);
        for (std::size_t p = lo; p < hi; ++p) {
          const auto idx = order[p];
          const auto& e = positives[idx];
          for (std::size_t r = 0; r < tc_.negatives_per_positive; ++r) {
            Rng rng = make_stream({tc_.master_seed, stream::kNegative, epoch, idx, r});
            batch.triples.push_back({e.user, e.item, sample_negative(graph_, e.user, rng)});
            batch.positive_index.push_back(idx);
          }
        }
        loss_sum += step(model, adam, batch, epoch);
        loss_count += batch.triples.size();
      }

      EpochRecord rec;
      rec.phase = to_string(kind_);
      rec.epoch = epoch;
      rec.train_loss = loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0;

      const bool validate_now = !split_.val.empty() &&
                                (epoch % tc_.eval_every == 0 || epoch == tc_.epochs);
      bool stop = false;
      if (validate_now) {
        const auto [hr, ndcg] = validation_metrics(model);
        rec.val_hr10 = hr;
        rec.val_ndcg10 = ndcg;
        if (hr > best_hr) {
          best_hr = hr;
          best = model;
          best_adam = adam;
          stale = 0;
        } else if (++stale >= tc_.early_stop_patience) {
          stop = true;
        }
      }
      rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                              start)
                        .count();
      result.history.push_back(rec);
      if (stop) break;
    }
    if (best) {
      result.model = std::move(*best);
      result.optimizers.push_back(std::move(best_adam));
    } else {
      result.model = std::move(model);
      result.optimizers.push_back(std::move(adam));
    }
    return result;
  }

 private:
  bool uses_subgraphs() const { return kind_ == ModelKind::Lgcf || kind_ == ModelKind::LgcfEmb; }

  LocalizedGraph positive_graph(const Batch& batch, std::size_t j, std::uint64_t epoch) const {
    if (!cached_.empty()) return cached_[batch.positive_index[j]];
    const auto& t = batch.triples[j];
    return localized_graph(graph_, t.user, t.positive, tc_.model.walk, tc_.master_seed, epoch);
  }

  LocalizedGraph negative_graph(const Triple& t, std::uint64_t epoch) const {
    return localized_graph(graph_, t.user, t.negative, tc_.model.walk, tc_.master_seed,
                           tc_.cache_subgraphs ? 0 : epoch);
  }

  // Returns the summed triple loss of the batch; applies one Adam step on
  // the batch-mean gradient.
  double step(Model& model, AdamState& adam, const Batch& batch, std::uint64_t epoch) {
    const std::size_t b = batch.triples.size();
    const double inv = 1.0 / static_cast<double>(b);
    std::vector<double> losses(b, 0.0);
    const auto enc = tc_.model.encoding();

    switch (kind_) {
      case ModelKind::Lgcf: {
        std::vector<GnnGradients> parts(b);
        parallel_for(b, tc_.threads, [&](std::size_t j) {
          parts[j] = GnnGradients::zeros_like(model.gnn);
          const auto pos = positive_graph(batch, j, epoch);
          const auto neg = negative_graph(batch.triples[j], epoch);
          losses[j] = lgcf_triple(pos, neg, model.gnn, enc, &parts[j]);
        });
        auto total = GnnGradients::zeros_like(model.gnn);
        for (const auto& p : parts) total.add(p);
        total.scale(inv);
        adam_step(model.gnn, total, adam);
        break;
      }
      case ModelKind::Mf:
      case ModelKind::LightGcn: {
        const bool propagate = kind_ == ModelKind::LightGcn;
        const std::size_t layers = tc_.model.lightgcn_layers;
        const EmbeddingTable refined =
            propagate ? lightgcn_propagate(graph_, model.embeddings, layers) : model.embeddings;
        std::vector<RowGradients> parts(b);
        parallel_for(b, tc_.threads, [&](std::size_t j) {
          losses[j] = embedding_triple(refined, batch.triples[j], &parts[j]);
        });
        RowGradients rows;
        for (auto& p : parts) rows.insert(rows.end(), p.begin(), p.end());
        auto grad = dense_row_gradients(rows, graph_.num_users(), graph_.num_items(),
                                        model.embeddings.dim());
        if (propagate) grad = lightgcn_propagate(graph_, grad, layers);
        for (auto& v : grad.users.values()) v *= inv;
        for (auto& v : grad.items.values()) v *= inv;
        add_l2(model, batch.triples, tc_.l2, grad);
        std::vector<std::span<const double>> g{grad.users.values(), grad.items.values()};
        adam_step(model_blocks(model), g, adam);
        break;
      }
      case ModelKind::LgcfEmb: {
        const std::size_t layers = tc_.model.lightgcn_layers;
        const EmbeddingTable refined = lightgcn_propagate(graph_, model.embeddings, layers);
        std::vector<JointGradients> parts(b);
        parallel_for(b, tc_.threads, [&](std::size_t j) {
          parts[j].gnn = GnnGradients::zeros_like(model.gnn);
          parts[j].joint.assign(model.joint.size(), 0.0);
          const auto pos = positive_graph(batch, j, epoch);
          const auto neg = negative_graph(batch.triples[j], epoch);
          losses[j] = lgcf_emb_triple(pos, neg, batch.triples[j], model.gnn, refined, model.joint,
                                      enc, &parts[j]);
        });
        auto gnn = GnnGradients::zeros_like(model.gnn);
        std::vector<double> joint(model.joint.size(), 0.0);
        RowGradients rows;
        for (auto& p : parts) {
          gnn.add(p.gnn);
          for (std::size_t j = 0; j < joint.size(); ++j) joint[j] += p.joint[j];
          rows.insert(rows.end(), p.rows.begin(), p.rows.end());
        }
        gnn.scale(inv);
        for (auto& v : joint) v *= inv;
        auto grad = lightgcn_propagate(
            graph_,
            dense_row_gradients(rows, graph_.num_users(), graph_.num_items(),
                                model.embeddings.dim()),
            layers);
        for (auto& v : grad.users.values()) v *= inv;
        for (auto& v : grad.items.values()) v *= inv;
        add_l2(model, batch.triples, tc_.l2, grad);
        std::vector<std::span<const double>> g;
        for (auto blk : gnn.blocks()) g.push_back(blk);
        g.push_back(grad.users.values());
        g.push_back(grad.items.values());
        g.emplace_back(joint);
        adam_step(model_blocks(model), g, adam);
        ++model.gnn.generation;
        break;
      }
      case ModelKind::LgcfEns:
        throw ContractViolation("lgcf-ens is trained through its two components");
    }
    return std::accumulate(losses.begin(), losses.end(), 0.0);
  }

  std::pair<double, double> validation_metrics(const Model& model) const {
    ModelScorer scorer(model, graph_);
    auto protocol = tc_.validation;
    protocol.threads = tc_.threads;
    const auto run = evaluate_pairs(scorer, split_, split_.val, protocol);
    const std::size_t ks[] = {10};
    const auto m = metrics_from_outcomes(run.outcomes, ks);
    return {m.front().hr.mean, m.front().ndcg.mean};
  }

  ModelKind kind_;
  const BipartiteGraph& graph_;
  const SplitSpec& split_;
  const TrainConfig& tc_;
  std::vector<LocalizedGraph> cached_;
};

double validation_hr(const Model& model, const BipartiteGraph& train_graph, const SplitSpec& split,
                     const TrainConfig& tc) {
  ModelScorer scorer(model, train_graph);
  auto protocol = tc.validation;
  protocol.threads = tc.threads;
  const auto run = evaluate_pairs(scorer, split, split.val, protocol);
  const std::size_t ks[] = {10};
  return metrics_from_outcomes(run.outcomes, ks).front().hr.mean;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1 || batch_size < 1 || negatives_per_positive < 1 || early_stop_patience < 1 ||
      eval_every < 1) {
    throw DomainError("epochs, batch_size, negatives, patience and eval_every must be >= 1");
  }
  if (lambda && !std::isfinite(*lambda)) throw DomainError("lambda must be finite");
  if (!lambda && lambda_grid.empty()) throw DomainError("lambda grid is empty");
  model.walk.validate();
  validation.validate();
}

Model init_model(ModelKind kind, std::size_t num_users, std::size_t num_items,
                 const TrainConfig& tc) {
  Model m;
  m.kind = kind;
  m.config = tc.model;
  m.seed = tc.master_seed;
  Rng rng = make_stream({tc.master_seed, stream::kInit, static_cast<std::uint64_t>(kind)});
  const bool has_gnn = kind != ModelKind::Mf && kind != ModelKind::LightGcn;
  const bool has_emb = kind != ModelKind::Lgcf;
  if (has_gnn) m.gnn = GnnParameters::init(tc.model.gnn, rng);
  if (has_emb) {
    m.embeddings =
        EmbeddingTable::normal(num_users, num_items, tc.model.embedding_dim, tc.init_std, rng);
  }
  if (kind == ModelKind::LgcfEmb) {
    const std::size_t width = tc.model.embedding_dim + tc.model.gnn.hidden;
    const double bound = std::sqrt(6.0 / static_cast<double>(width + 1));
    std::uniform_real_distribution<double> dist(-bound, bound);
    m.joint.resize(width);
    for (auto& v : m.joint) v = dist(rng);
  }
  if (kind == ModelKind::LgcfEns) m.lambda = tc.lambda.value_or(0.0);
  return m;
}

TrainResult train(ModelKind kind, const BipartiteGraph& graph, const SplitSpec& split,
                  const TrainConfig& tc) {
  tc.validate();
  validate_split(graph, split);
  const BipartiteGraph train_graph = training_graph(split);

  if (kind != ModelKind::LgcfEns) return Trainer(kind, train_graph, split, tc).run();

  // The ensemble trains its two halves separately, then fixes lambda.
  auto lgcf = Trainer(ModelKind::Lgcf, train_graph, split, tc).run();
  auto light = Trainer(ModelKind::LightGcn, train_graph, split, tc).run();
  TrainResult result;
  result.history = lgcf.history;
  result.history.insert(result.history.end(), light.history.begin(), light.history.end());
  result.optimizers = {std::move(lgcf.optimizers.front()), std::move(light.optimizers.front())};
  result.model = init_model(ModelKind::LgcfEns, graph.num_users(), graph.num_items(), tc);
  result.model.gnn = std::move(lgcf.model.gnn);
  result.model.embeddings = std::move(light.model.embeddings);

  if (tc.lambda) {
    result.model.lambda = *tc.lambda;
  } else if (!split.val.empty()) {
    double best = -1.0;
    double best_lambda = tc.lambda_grid.front();
    for (double lambda : tc.lambda_grid) {
      result.model.lambda = lambda;
      const double hr = validation_hr(result.model, train_graph, split, tc);
      if (hr > best) {
        best = hr;
        best_lambda = lambda;
      }
    }
    result.model.lambda = best_lambda;
  } else {
    result.model.lambda = tc.lambda_grid.front();
  }
  return result;
}

void write_history(std::ostream& out, const std::vector<EpochRecord>& history) {
  for (const auto& r : history) {
    nlohmann::ordered_json j;
    j["phase"] = r.phase;
    j["epoch"] = r.epoch;
    j["train_loss"] = r.train_loss;
    j["val_hr10"] = r.val_hr10 ? nlohmann::ordered_json(*r.val_hr10) : nlohmann::ordered_json();
    j["val_ndcg10"] =
        r.val_ndcg10 ? nlohmann::ordered_json(*r.val_ndcg10) : nlohmann::ordered_json();
    j["wall_ms"] = r.wall_ms;
    out << j.dump() << '\n';
  }
}

}  // namespace lgcf
