#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "lgcf/evaluate.hpp"
#include "lgcf/models.hpp"
#include "lgcf/train.hpp"

namespace lgcf {

// A model together with the training graph it scores against.
class OwningScorer final : public Scorer {
 public:
  OwningScorer(Model model, BipartiteGraph train_graph)
      : model_(std::move(model)), graph_(std::move(train_graph)), inner_(model_, graph_) {}
  OwningScorer(const OwningScorer&) = delete;
  OwningScorer& operator=(const OwningScorer&) = delete;

  void score(NodeId user, std::span<const NodeId> items, std::span<double> out) const override {
    inner_.score(user, items, out);
  }
  std::string name() const override { return inner_.name(); }
  const Model& model() const noexcept { return model_; }
  const ModelScorer& inner() const noexcept { return inner_; }

 private:
  Model model_;
  BipartiteGraph graph_;
  ModelScorer inner_;
};

// Produces a scorer for one model kind trained on `level_split`.
using ScorerFactory =
    std::function<std::unique_ptr<Scorer>(ModelKind kind, const SplitSpec& level_split)>;

// Default factory: train() from scratch with `tc`.
ScorerFactory training_factory(const BipartiteGraph& graph, const TrainConfig& tc);

inline const std::vector<double> kDefaultLevelFractions = {0.0, 0.2, 0.4, 0.6, 0.8};

// Level x (1-based) keeps the necessary set plus all but fractions[x-1] of
// the additional set of base.train. Every kind is rebuilt at every level and
// ranked on the candidate lists of base.test, identical across levels;
// results land in report.levels, level-major.
EvalReport sparsity_sweep(std::span<const ModelKind> kinds, const SplitSpec& base,
                          std::span<const double> fractions, std::uint64_t level_seed,
                          const EvalProtocol& protocol, const ScorerFactory& factory);

}  // namespace lgcf
