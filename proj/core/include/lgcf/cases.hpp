#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lgcf/evaluate.hpp"
#include "lgcf/subgraph.hpp"

namespace lgcf {

struct CaseConfig {
  WalkConfig walk;
  std::uint64_t seed = 0;  // extraction streams for the dumped graphs
  std::size_t k = 10;      // "correctly ranked" means rank <= k
  std::size_t max_cases = 20;
};

struct CaseRow {
  std::string pair_kind;  // "positive" or "negative"
  NodeId user = 0;
  NodeId item = 0;
  double score_a = 0.0;
  double score_b = 0.0;
  std::string dump_file;  // relative to the output directory
};

// Finds test pairs ranked within the top k by scorer_a but not by scorer_b.
// For each, dumps the labeled localized graph of the pair and of the
// negative scorer_b ranked highest, and writes manifest.csv
// ("pair_kind,u,i,score_a,score_b,dump_file") into out_dir, which must exist.
std::vector<CaseRow> dump_cases(const Scorer& scorer_a, const Scorer& scorer_b,
                                const SplitSpec& split, const EvalProtocol& protocol,
                                const CaseConfig& cfg, const std::string& out_dir);

std::vector<CaseRow> read_manifest(const std::string& path);

}  // namespace lgcf
