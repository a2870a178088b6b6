#include "lgcf/probe.hpp"

#include <algorithm>
#include <numeric>

#include "lgcf/errors.hpp"

namespace lgcf {

std::vector<std::size_t> group_sizes(std::size_t pairs, std::size_t groups) {
  if (groups == 0) throw DomainError("n_groups must be >= 1");
  std::vector<std::size_t> sizes(groups, pairs / groups);
  for (std::size_t g = 0; g < pairs % groups; ++g) ++sizes[g];
  return sizes;
}

EvalReport degree_probe(const Scorer& scorer, const SplitSpec& split, const EvalProtocol& protocol,
                        std::size_t n_groups) {
  const auto sizes = group_sizes(split.test.size(), n_groups);
  const BipartiteGraph train_graph = training_graph(split);

  std::vector<double> degree(split.test.size());
  for (std::size_t p = 0; p < split.test.size(); ++p) {
    const auto& e = split.test[p];
    degree[p] = 0.5 * static_cast<double>(train_graph.degree(e.user) + train_graph.degree(e.item));
  }
  std::vector<std::size_t> order(split.test.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return degree[a] < degree[b]; });

  const EvalRun run = evaluate_pairs(scorer, split, split.test, protocol);

  EvalReport report;
  report.metrics = metrics_from_outcomes(run.outcomes, protocol.ks);
  report.pairs = split.test.size() - run.skipped;
  report.skipped = run.skipped;
  report.metadata.model = scorer.name();
  report.metadata.seeds = {protocol.seed};
  report.metadata.n_negatives = protocol.n_negatives;
  report.metadata.full_ranking = protocol.full_ranking;

  std::size_t offset = 0;
  for (std::size_t g = 0; g < n_groups; ++g) {
    GroupReport group;
    group.index = g + 1;
    group.size = sizes[g];
    std::vector<std::optional<PairOutcome>> members;
    for (std::size_t j = offset; j < offset + sizes[g]; ++j) members.push_back(run.outcomes[order[j]]);
    if (sizes[g] > 0) {
      group.min_degree = degree[order[offset]];
      group.max_degree = degree[order[offset + sizes[g] - 1]];
    }
    group.metrics = metrics_from_outcomes(members, protocol.ks);
    report.groups.push_back(std::move(group));
    offset += sizes[g];
  }
  return report;
}

}  // namespace lgcf
