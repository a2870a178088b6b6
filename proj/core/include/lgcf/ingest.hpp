#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lgcf/graph.hpp"

namespace lgcf {

// Column layout of a delimited interaction file. Indices are 0-based.
struct ColumnSpec {
  char delimiter = '\0';  // '\0' = detect per line: tab if present, else comma
  std::size_t user_col = 0;
  std::size_t item_col = 1;
  std::optional<std::size_t> rating_col;  // required when a threshold is used
};

struct IngestResult {
  EdgeList edges;  // deduplicated, in first-occurrence order
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  std::vector<std::string> user_keys;  // user_keys[u] is the raw key of user u
  std::vector<std::string> item_keys;  // item_keys[i - num_users] for item node i
};

// Reads "user, item[, rating, ...]" records. Keys are re-indexed densely in
// first-appearance order over all parsed rows; only rows with
// rating >= threshold become edges. '#' lines and blank lines are skipped.
// Throws ParseError (with line number) on malformed rows and DomainError when
// no edge survives.
IngestResult ingest_interactions(std::istream& in, const ColumnSpec& spec,
                                 std::optional<double> rating_threshold = std::nullopt);
IngestResult ingest_interactions(const std::string& path, const ColumnSpec& spec,
                                 std::optional<double> rating_threshold = std::nullopt);

// Key sidecar: "side<TAB>id<TAB>key" per node.
void write_key_map(std::ostream& out, const IngestResult& result);

}  // namespace lgcf
