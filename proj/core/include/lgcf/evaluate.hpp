#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lgcf/graph.hpp"
#include "lgcf/report.hpp"
#include "lgcf/split.hpp"

namespace lgcf {

struct EvalProtocol {
  std::size_t n_negatives = 99;
  std::vector<std::size_t> ks = {5, 10, 20};
  std::uint64_t seed = 0;
  bool full_ranking = false;  // rank against every non-positive item
  unsigned threads = 1;

  void validate() const;  // throws DomainError
};

// Scores candidate items for one user. Implementations must be callable
// concurrently and deterministic per (user, item).
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual void score(NodeId user, std::span<const NodeId> items, std::span<double> out) const = 0;
  virtual std::string name() const = 0;
};

// Positive first, then the sampled negatives.
struct CandidateList {
  Edge pair;
  std::vector<NodeId> items;
};

// Negatives are drawn without replacement from the items the user has no
// train/val/test edge with, from a stream keyed by (seed, user, item). A
// pair whose user has no such item is skipped (nullopt).
std::vector<std::optional<CandidateList>> make_candidates(const SplitSpec& split,
                                                          std::span<const Edge> targets,
                                                          const EvalProtocol& protocol);

// Candidate positions ordered by descending score, ties by ascending item
// id. NaN scores sort last.
std::vector<std::size_t> ranking(std::span<const NodeId> items, std::span<const double> scores);

// 1-based rank of items[0] under the same ordering as ranking().
std::size_t rank_of_first(std::span<const NodeId> items, std::span<const double> scores);

struct PairOutcome {
  Edge pair;
  std::size_t rank = 0;
  std::size_t candidates = 0;
};

struct EvalRun {
  std::vector<std::optional<PairOutcome>> outcomes;  // aligned with targets
  std::size_t skipped = 0;
};

EvalRun evaluate_pairs(const Scorer& scorer, const SplitSpec& split, std::span<const Edge> targets,
                       const EvalProtocol& protocol);

// Means over the evaluated (non-skipped) outcomes.
std::vector<KMetrics> metrics_from_outcomes(std::span<const std::optional<PairOutcome>> outcomes,
                                            std::span<const std::size_t> ks);

// Ranks every test edge of the split.
EvalReport evaluate(const Scorer& scorer, const SplitSpec& split, const EvalProtocol& protocol);

}  // namespace lgcf
