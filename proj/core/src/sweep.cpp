#include "lgcf/sweep.hpp"

#include "lgcf/errors.hpp"

namespace lgcf {

ScorerFactory training_factory(const BipartiteGraph& graph, const TrainConfig& tc) {
  return [&graph, tc](ModelKind kind, const SplitSpec& level_split) -> std::unique_ptr<Scorer> {
    auto result = train(kind, graph, level_split, tc);
    return std::make_unique<OwningScorer>(std::move(result.model), training_graph(level_split));
  };
}

EvalReport sparsity_sweep(std::span<const ModelKind> kinds, const SplitSpec& base,
                          std::span<const double> fractions, std::uint64_t level_seed,
                          const EvalProtocol& protocol, const ScorerFactory& factory) {
  if (fractions.empty()) throw DomainError("sparsity sweep needs at least one level");
  const auto levels = sparsity_levels(training_graph(base), fractions, level_seed);

  EvalReport report;
  report.metadata.seeds = {level_seed, protocol.seed};
  report.metadata.n_negatives = protocol.n_negatives;
  report.metadata.full_ranking = protocol.full_ranking;
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    report.metadata.model += (k ? "," : "") + to_string(kinds[k]);
  }

  for (std::size_t x = 0; x < levels.size(); ++x) {
    const int level = static_cast<int>(x) + 1;
    const SplitSpec level_split = with_training_level(base, levels[x], level);
    for (ModelKind kind : kinds) {
      const auto scorer = factory(kind, level_split);
      // Candidates come from the base split so every level ranks the same lists
      // and dropped training edges never pose as negatives.
      const auto run = evaluate_pairs(*scorer, base, base.test, protocol);
      LevelReport lr;
      lr.level = level;
      lr.model = to_string(kind);
      lr.train_edges = level_split.train.size();
      lr.metrics = metrics_from_outcomes(run.outcomes, protocol.ks);
      report.levels.push_back(std::move(lr));
      report.pairs = run.outcomes.size() - run.skipped;
      report.skipped = run.skipped;
    }
  }
  return report;
}

}  // namespace lgcf
