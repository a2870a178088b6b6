#include "lgcf/report.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "lgcf/errors.hpp"

namespace lgcf {
namespace {

const KMetrics& find_k(const std::vector<KMetrics>& metrics, std::size_t k) {
  for (const auto& m : metrics) {
    if (m.k == k) return m;
  }
  throw DomainError("metrics at K=" + std::to_string(k) + " were not evaluated");
}

MetricSummary summarize(const std::vector<double>& xs) {
  MetricSummary s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double sq = 0.0;
    for (double x : xs) sq += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(sq / static_cast<double>(xs.size() - 1));
  }
  return s;
}

nlohmann::ordered_json metrics_json(const std::vector<KMetrics>& metrics) {
  auto j = nlohmann::ordered_json::object();
  for (const auto& m : metrics) {
    j[std::to_string(m.k)] = {{"hr", m.hr.mean},
                              {"hr_std", m.hr.std},
                              {"ndcg", m.ndcg.mean},
                              {"ndcg_std", m.ndcg.std}};
  }
  return j;
}

std::vector<KMetrics> metrics_from_json(const nlohmann::ordered_json& j) {
  std::vector<KMetrics> out;
  for (const auto& [key, value] : j.items()) {
    KMetrics m;
    m.k = std::stoull(key);
    m.hr = {value.at("hr").get<double>(), value.at("hr_std").get<double>()};
    m.ndcg = {value.at("ndcg").get<double>(), value.at("ndcg_std").get<double>()};
    out.push_back(m);
  }
  return out;
}

void metric_header(std::ostream& out, const std::vector<KMetrics>& metrics) {
  for (const auto& m : metrics) out << ",HR@" << m.k << ",NDCG@" << m.k;
}

void metric_row(std::ostream& out, const std::vector<KMetrics>& metrics) {
  for (const auto& m : metrics) out << ',' << m.hr.mean << ',' << m.ndcg.mean;
}

}  // namespace

double EvalReport::hr(std::size_t k) const { return find_k(metrics, k).hr.mean; }
double EvalReport::ndcg(std::size_t k) const { return find_k(metrics, k).ndcg.mean; }

std::vector<KMetrics> aggregate_metrics(std::span<const std::vector<KMetrics>> runs) {
  if (runs.empty()) return {};
  std::vector<KMetrics> out;
  for (std::size_t idx = 0; idx < runs.front().size(); ++idx) {
    std::vector<double> hr, ndcg;
    const std::size_t k = runs.front()[idx].k;
    for (const auto& run : runs) {
      if (run.size() != runs.front().size() || run[idx].k != k) {
        throw DomainError("cannot aggregate runs with different K values");
      }
      hr.push_back(run[idx].hr.mean);
      ndcg.push_back(run[idx].ndcg.mean);
    }
    out.push_back({k, summarize(hr), summarize(ndcg)});
  }
  return out;
}

EvalReport aggregate_reports(std::span<const EvalReport> runs) {
  if (runs.empty()) throw DomainError("no reports to aggregate");
  std::vector<std::vector<KMetrics>> metrics;
  EvalReport out;
  out.metadata = runs.front().metadata;
  out.metadata.seeds.clear();
  for (const auto& r : runs) {
    metrics.push_back(r.metrics);
    out.pairs += r.pairs;
    out.skipped += r.skipped;
    out.metadata.seeds.insert(out.metadata.seeds.end(), r.metadata.seeds.begin(),
                              r.metadata.seeds.end());
  }
  out.metrics = aggregate_metrics(metrics);
  return out;
}

nlohmann::ordered_json to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["metadata"] = {{"model", report.metadata.model},
                   {"config_hash", report.metadata.config_hash},
                   {"seeds", report.metadata.seeds},
                   {"n_negatives", report.metadata.n_negatives},
                   {"full_ranking", report.metadata.full_ranking}};
  j["pairs"] = report.pairs;
  j["skipped"] = report.skipped;
  j["metrics"] = metrics_json(report.metrics);
  if (!report.groups.empty()) {
    auto groups = nlohmann::ordered_json::array();
    for (const auto& g : report.groups) {
      groups.push_back({{"group", g.index},
                        {"size", g.size},
                        {"min_degree", g.min_degree},
                        {"max_degree", g.max_degree},
                        {"metrics", metrics_json(g.metrics)}});
    }
    j["groups"] = std::move(groups);
  }
  if (!report.levels.empty()) {
    auto levels = nlohmann::ordered_json::array();
    for (const auto& l : report.levels) {
      levels.push_back({{"level", l.level},
                        {"model", l.model},
                        {"train_edges", l.train_edges},
                        {"metrics", metrics_json(l.metrics)}});
    }
    j["levels"] = std::move(levels);
  }
  return j;
}

EvalReport report_from_json(const nlohmann::ordered_json& j) {
  EvalReport r;
  const auto& meta = j.at("metadata");
  r.metadata.model = meta.at("model").get<std::string>();
  r.metadata.config_hash = meta.at("config_hash").get<std::string>();
  r.metadata.seeds = meta.at("seeds").get<std::vector<std::uint64_t>>();
  r.metadata.n_negatives = meta.at("n_negatives").get<std::size_t>();
  r.metadata.full_ranking = meta.at("full_ranking").get<bool>();
  r.pairs = j.at("pairs").get<std::size_t>();
  r.skipped = j.at("skipped").get<std::size_t>();
  r.metrics = metrics_from_json(j.at("metrics"));
  if (j.contains("groups")) {
    for (const auto& g : j["groups"]) {
      r.groups.push_back({g.at("group").get<std::size_t>(), g.at("size").get<std::size_t>(),
                          g.at("min_degree").get<double>(), g.at("max_degree").get<double>(),
                          metrics_from_json(g.at("metrics"))});
    }
  }
  if (j.contains("levels")) {
    for (const auto& l : j["levels"]) {
      r.levels.push_back({l.at("level").get<int>(), l.at("model").get<std::string>(),
                          l.at("train_edges").get<std::size_t>(),
                          metrics_from_json(l.at("metrics"))});
    }
  }
  return r;
}

std::string report_text(const EvalReport& report) { return to_json(report).dump(2) + "\n"; }

void save_report(const std::string& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write report " + path);
  out << report_text(report);
}

EvalReport load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open report " + path);
  return report_from_json(nlohmann::ordered_json::parse(in));
}

void write_level_csv(std::ostream& out, std::span<const LevelReport> levels) {
  out << "level,model,train_edges";
  if (!levels.empty()) metric_header(out, levels.front().metrics);
  out << '\n';
  for (const auto& l : levels) {
    out << l.level << ',' << l.model << ',' << l.train_edges;
    metric_row(out, l.metrics);
    out << '\n';
  }
}

void write_group_csv(std::ostream& out, std::span<const GroupReport> groups) {
  out << "group,size,min_degree,max_degree";
  if (!groups.empty()) metric_header(out, groups.front().metrics);
  out << '\n';
  for (const auto& g : groups) {
    out << g.index << ',' << g.size << ',' << g.min_degree << ',' << g.max_degree;
    metric_row(out, g.metrics);
    out << '\n';
  }
}

}  // namespace lgcf
