#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lgcf {

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // across seeds; 0 for a single run
};

struct KMetrics {
  std::size_t k = 0;
  MetricSummary hr;
  MetricSummary ndcg;
};

struct GroupReport {
  std::size_t index = 0;
  std::size_t size = 0;
  double min_degree = 0.0;  // mean endpoint train degree, lowest in the group
  double max_degree = 0.0;
  std::vector<KMetrics> metrics;
};

struct LevelReport {
  int level = 1;
  std::string model;
  std::size_t train_edges = 0;
  std::vector<KMetrics> metrics;
};

struct ReportMetadata {
  std::string model;
  std::string config_hash;
  std::vector<std::uint64_t> seeds;
  std::size_t n_negatives = 0;
  bool full_ranking = false;
};

struct EvalReport {
  std::vector<KMetrics> metrics;
  std::size_t pairs = 0;
  std::size_t skipped = 0;
  std::vector<GroupReport> groups;
  std::vector<LevelReport> levels;
  ReportMetadata metadata;

  // Mean HR / NDCG at k; throws DomainError if k was not evaluated.
  double hr(std::size_t k) const;
  double ndcg(std::size_t k) const;
};

// Mean and sample standard deviation over runs that share K values.
std::vector<KMetrics> aggregate_metrics(std::span<const std::vector<KMetrics>> runs);
EvalReport aggregate_reports(std::span<const EvalReport> runs);

nlohmann::ordered_json to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::ordered_json& j);
// Pretty-printed JSON with a trailing newline.
std::string report_text(const EvalReport& report);
void save_report(const std::string& path, const EvalReport& report);
EvalReport load_report(const std::string& path);

// "level,model,train_edges,HR@k,NDCG@k,..." header plus one row per level.
void write_level_csv(std::ostream& out, std::span<const LevelReport> levels);
// "group,size,min_degree,max_degree,HR@k,NDCG@k,..."
void write_group_csv(std::ostream& out, std::span<const GroupReport> groups);

}  // namespace lgcf
