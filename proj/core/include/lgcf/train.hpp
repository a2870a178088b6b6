#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lgcf/adam.hpp"
#include "lgcf/evaluate.hpp"
#include "lgcf/models.hpp"
#include "lgcf/split.hpp"

namespace lgcf {

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 64;
  std::size_t negatives_per_positive = 1;
  std::size_t early_stop_patience = 10;  // in validation rounds
  std::size_t eval_every = 1;            // epochs between validation rounds
  std::uint64_t master_seed = 1;
  AdamConfig adam;
  double l2 = 1e-4;        // on embedding rows touched by a batch
  double init_std = 0.1;   // embedding initialization
  ModelConfig model;
  std::optional<double> lambda;  // LgcfEns; validation grid search when empty
  std::vector<double> lambda_grid = {0.1, 0.5, 1.0, 2.0, 5.0};
  bool cache_subgraphs = false;  // one positive localized graph per edge for all epochs
  EvalProtocol validation{99, {10}, 0, false, 1};
  unsigned threads = 1;

  void validate() const;  // throws DomainError
};

struct EpochRecord {
  std::string phase;  // model kind being trained
  std::size_t epoch = 0;
  double train_loss = 0.0;
  std::optional<double> val_hr10;
  std::optional<double> val_ndcg10;
  double wall_ms = 0.0;
};

struct TrainResult {
  Model model;  // best-validation parameters
  std::vector<EpochRecord> history;
  // Optimizer state as of the kept parameters; one per trained component
  // (two for LgcfEns: lgcf, then lightgcn).
  std::vector<AdamState> optimizers;
};

// BPR training with Adam. Deterministic given tc.master_seed, whatever
// tc.threads is. Throws DomainError if the split does not fit the graph.
TrainResult train(ModelKind kind, const BipartiteGraph& graph, const SplitSpec& split,
                  const TrainConfig& tc);

// Fresh parameters for `kind`, as training starts from.
Model init_model(ModelKind kind, std::size_t num_users, std::size_t num_items,
                 const TrainConfig& tc);

// One JSON object per line: phase, epoch, train_loss, val_hr10, val_ndcg10, wall_ms.
void write_history(std::ostream& out, const std::vector<EpochRecord>& history);

}  // namespace lgcf
