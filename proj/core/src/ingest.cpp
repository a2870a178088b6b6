#include "lgcf/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "lgcf/errors.hpp"

namespace lgcf {
namespace {

std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
  if (delimiter == '\0') delimiter = line.find('\t') != std::string_view::npos ? '\t' : ',';
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(delimiter, start);
    fields.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::uint64_t pack(std::size_t u, std::size_t i) {
  return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(i);
}

}  // namespace

IngestResult ingest_interactions(std::istream& in, const ColumnSpec& spec,
                                 std::optional<double> rating_threshold) {
  if (rating_threshold && !spec.rating_col) {
    throw DomainError("a rating threshold needs a rating column");
  }
  const std::size_t needed =
      std::max({spec.user_col, spec.item_col, spec.rating_col.value_or(0)}) + 1;

  std::unordered_map<std::string, std::size_t> user_index, item_index;
  std::vector<std::string> user_keys, item_keys;
  std::vector<std::pair<std::size_t, std::size_t>> raw;  // (user index, item index)
  std::unordered_set<std::uint64_t> seen;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto fields = split_fields(view, spec.delimiter);
    if (fields.size() < needed) {
      throw ParseError(lineno, "expected at least " + std::to_string(needed) + " columns, got " +
                                   std::to_string(fields.size()));
    }
    auto user_key = trim(fields[spec.user_col]);
    auto item_key = trim(fields[spec.item_col]);
    if (user_key.empty() || item_key.empty()) throw ParseError(lineno, "empty user or item key");

    bool keep = true;
    if (spec.rating_col) {
      auto text = trim(fields[*spec.rating_col]);
      double rating = 0.0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), rating);
      if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ParseError(lineno, "rating \"" + std::string(text) + "\" is not a number");
      }
      keep = !rating_threshold || rating >= *rating_threshold;
    }

    auto [uit, unew] = user_index.try_emplace(std::string(user_key), user_keys.size());
    if (unew) user_keys.emplace_back(user_key);
    auto [iit, inew] = item_index.try_emplace(std::string(item_key), item_keys.size());
    if (inew) item_keys.emplace_back(item_key);

    if (keep && seen.insert(pack(uit->second, iit->second)).second) {
      raw.emplace_back(uit->second, iit->second);
    }
  }
  if (raw.empty()) throw DomainError("no interactions survived ingestion");

  IngestResult result;
  result.num_users = user_keys.size();
  result.num_items = item_keys.size();
  result.edges.reserve(raw.size());
  for (auto [u, i] : raw) {
    result.edges.push_back(
        {static_cast<NodeId>(u), static_cast<NodeId>(result.num_users + i)});
  }
  result.user_keys = std::move(user_keys);
  result.item_keys = std::move(item_keys);
  return result;
}

IngestResult ingest_interactions(const std::string& path, const ColumnSpec& spec,
                                 std::optional<double> rating_threshold) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open interaction file " + path);
  return ingest_interactions(in, spec, rating_threshold);
}

void write_key_map(std::ostream& out, const IngestResult& result) {
  for (std::size_t u = 0; u < result.user_keys.size(); ++u) {
    out << "user\t" << u << '\t' << result.user_keys[u] << '\n';
  }
  for (std::size_t i = 0; i < result.item_keys.size(); ++i) {
    out << "item\t" << result.num_users + i << '\t' << result.item_keys[i] << '\n';
  }
}

}  // namespace lgcf
