#include "lgcf/cases.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lgcf/errors.hpp"
#include "lgcf/models.hpp"

namespace lgcf {
namespace {

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double score_one(const Scorer& s, NodeId user, NodeId item) {
  double out = 0.0;
  s.score(user, std::span<const NodeId>(&item, 1), std::span<double>(&out, 1));
  return out;
}

}  // namespace

std::vector<CaseRow> dump_cases(const Scorer& scorer_a, const Scorer& scorer_b,
                                const SplitSpec& split, const EvalProtocol& protocol,
                                const CaseConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const BipartiteGraph train_graph = training_graph(split);
  const auto candidates = make_candidates(split, split.test, protocol);

  std::vector<CaseRow> rows;
  std::size_t found = 0;
  for (const auto& cand : candidates) {
    if (!cand || found >= cfg.max_cases) continue;
    const auto& items = cand->items;
    std::vector<double> a(items.size()), b(items.size());
    scorer_a.score(cand->pair.user, items, a);
    scorer_b.score(cand->pair.user, items, b);
    if (rank_of_first(items, a) > cfg.k || rank_of_first(items, b) <= cfg.k) continue;

    const auto order_b = ranking(items, b);
    const NodeId negative = items[order_b.front() == 0 ? order_b[1] : order_b.front()];
    ++found;

    auto dump = [&](const std::string& kind, NodeId item) {
      const NodeId user = cand->pair.user;
      const LocalizedGraph lg = localized_graph(train_graph, user, item, cfg.walk, cfg.seed, kEvalEpoch);
      const std::string name =
          "case" + std::to_string(found) + "_" + kind + "_" + std::to_string(user) + "_" +
          std::to_string(item) + ".txt";
      std::ofstream out(fs::path(out_dir) / name);
      if (!out) throw DomainError("cannot write " + (fs::path(out_dir) / name).string());
      write_dump(out, lg);
      rows.push_back({kind, user, item, score_one(scorer_a, user, item),
                      score_one(scorer_b, user, item), name});
    };
    dump("positive", cand->pair.item);
    dump("negative", negative);
  }

  std::ofstream manifest(fs::path(out_dir) / "manifest.csv");
  if (!manifest) throw DomainError("cannot write manifest in " + out_dir);
  manifest << "pair_kind,u,i,score_a,score_b,dump_file\n";
  for (const auto& r : rows) {
    manifest << r.pair_kind << ',' << r.user << ',' << r.item << ',' << fmt(r.score_a) << ','
             << fmt(r.score_b) << ',' << r.dump_file << '\n';
  }
  return rows;
}

std::vector<CaseRow> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read " + path);
  std::vector<CaseRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    std::istringstream ss(line);
    std::string f[6];
    for (auto& field : f) {
      if (!std::getline(ss, field, ',')) throw ParseError(line_no, "expected 6 fields");
    }
    CaseRow r;
    r.pair_kind = f[0];
    try {
      r.user = static_cast<NodeId>(std::stoul(f[1]));
      r.item = static_cast<NodeId>(std::stoul(f[2]));
      r.score_a = std::stod(f[3]);
      r.score_b = std::stod(f[4]);
    } catch (const std::exception&) {
      throw ParseError(line_no, "bad number");
    }
    r.dump_file = f[5];
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace lgcf
