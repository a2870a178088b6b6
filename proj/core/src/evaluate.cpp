#include "lgcf/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lgcf/errors.hpp"
#include "lgcf/metrics.hpp"
#include "lgcf/parallel.hpp"
#include "lgcf/random.hpp"

namespace lgcf {
namespace {

double sort_key(double s) { return std::isnan(s) ? -std::numeric_limits<double>::infinity() : s; }

// True if candidate a outranks candidate b.
bool outranks(double sa, NodeId a, double sb, NodeId b) {
  const double ka = sort_key(sa);
  const double kb = sort_key(sb);
  if (ka != kb) return ka > kb;
  return a < b;
}

std::vector<std::vector<NodeId>> positives_by_user(const SplitSpec& split) {
  std::vector<std::vector<NodeId>> pos(split.num_users);
  for (const auto* list : {&split.train, &split.val, &split.test}) {
    for (const auto& e : *list) pos[e.user].push_back(e.item);
  }
  for (auto& p : pos) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
  }
  return pos;
}

}  // namespace

void EvalProtocol::validate() const {
  if (n_negatives < 1) throw DomainError("n_negatives must be at least 1");
  if (ks.empty()) throw DomainError("at least one K is required");
  for (auto k : ks) {
    if (k < 1) throw DomainError("K values must be positive");
    if (!full_ranking && k > n_negatives + 1) {
      throw DomainError("K=" + std::to_string(k) + " exceeds the candidate list length");
    }
  }
}

std::vector<std::optional<CandidateList>> make_candidates(const SplitSpec& split,
                                                          std::span<const Edge> targets,
                                                          const EvalProtocol& protocol) {
  const auto positives = positives_by_user(split);
  const std::size_t m = split.num_items;
  const auto first_item = static_cast<NodeId>(split.num_users);
  std::vector<std::optional<CandidateList>> out(targets.size());

  for (std::size_t t = 0; t < targets.size(); ++t) {
    const Edge pair = targets[t];
    const auto& pos = positives.at(pair.user);
    auto is_positive = [&](NodeId item) { return std::binary_search(pos.begin(), pos.end(), item); };
    const std::size_t available = m - pos.size() - (is_positive(pair.item) ? 0 : 1);
    if (available == 0) continue;

    CandidateList list;
    list.pair = pair;
    list.items.push_back(pair.item);
    Rng rng = make_stream({protocol.seed, stream::kEvalCandidates, pair.user, pair.item});
    const std::size_t wanted = protocol.full_ranking ? available : std::min(available, protocol.n_negatives);

    if (wanted == available || available < 2 * wanted) {
      std::vector<NodeId> pool;
      pool.reserve(available);
      for (std::size_t j = 0; j < m; ++j) {
        const auto item = static_cast<NodeId>(first_item + j);
        if (item != pair.item && !is_positive(item)) pool.push_back(item);
      }
      if (wanted < pool.size()) {
        for (std::size_t j = 0; j < wanted; ++j) {
          std::swap(pool[j], pool[j + uniform_index(rng, pool.size() - j)]);
        }
        pool.resize(wanted);
      }
      list.items.insert(list.items.end(), pool.begin(), pool.end());
    } else {
      while (list.items.size() < wanted + 1) {
        const auto item = static_cast<NodeId>(first_item + uniform_index(rng, m));
        if (is_positive(item) || item == pair.item) continue;
        if (std::find(list.items.begin(), list.items.end(), item) != list.items.end()) continue;
        list.items.push_back(item);
      }
    }
    out[t] = std::move(list);
  }
  return out;
}

std::vector<std::size_t> ranking(std::span<const NodeId> items, std::span<const double> scores) {
  if (items.size() != scores.size()) throw ContractViolation("ranking: length mismatch");
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return outranks(scores[a], items[a], scores[b], items[b]);
  });
  return order;
}

std::size_t rank_of_first(std::span<const NodeId> items, std::span<const double> scores) {
  if (items.empty() || items.size() != scores.size()) {
    throw ContractViolation("rank_of_first: need matching, non-empty candidates");
  }
  std::size_t rank = 1;
  for (std::size_t j = 1; j < items.size(); ++j) {
    if (outranks(scores[j], items[j], scores[0], items[0])) ++rank;
  }
  return rank;
}

EvalRun evaluate_pairs(const Scorer& scorer, const SplitSpec& split, std::span<const Edge> targets,
                       const EvalProtocol& protocol) {
  protocol.validate();
  const auto candidates = make_candidates(split, targets, protocol);
  EvalRun run;
  run.outcomes.resize(targets.size());
  parallel_for(targets.size(), protocol.threads, [&](std::size_t t) {
    if (!candidates[t]) return;
    const auto& list = *candidates[t];
    std::vector<double> scores(list.items.size());
    scorer.score(list.pair.user, list.items, scores);
    run.outcomes[t] = PairOutcome{list.pair, rank_of_first(list.items, scores), list.items.size()};
  });
  for (const auto& o : run.outcomes) run.skipped += o ? 0 : 1;
  return run;
}

std::vector<KMetrics> metrics_from_outcomes(std::span<const std::optional<PairOutcome>> outcomes,
                                            std::span<const std::size_t> ks) {
  std::vector<KMetrics> out;
  for (auto k : ks) {
    double hr = 0.0, ndcg = 0.0;
    std::size_t n = 0;
    for (const auto& o : outcomes) {
      if (!o) continue;
      hr += hr_at_k(o->rank, k);
      ndcg += ndcg_at_k(o->rank, k);
      ++n;
    }
    KMetrics m;
    m.k = k;
    if (n > 0) {
      m.hr.mean = hr / static_cast<double>(n);
      m.ndcg.mean = ndcg / static_cast<double>(n);
    }
    out.push_back(m);
  }
  return out;
}

EvalReport evaluate(const Scorer& scorer, const SplitSpec& split, const EvalProtocol& protocol) {
  const auto run = evaluate_pairs(scorer, split, split.test, protocol);
  EvalReport report;
  report.metrics = metrics_from_outcomes(run.outcomes, protocol.ks);
  report.pairs = run.outcomes.size() - run.skipped;
  report.skipped = run.skipped;
  report.metadata.model = scorer.name();
  report.metadata.seeds = {protocol.seed};
  report.metadata.n_negatives = protocol.n_negatives;
  report.metadata.full_ranking = protocol.full_ranking;
  return report;
}

}  // namespace lgcf
