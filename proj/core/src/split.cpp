#include "lgcf/split.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "lgcf/errors.hpp"
#include "lgcf/random.hpp"

namespace lgcf {
namespace {

EdgeList shuffled_edges(const BipartiteGraph& graph, Rng& rng) {
  EdgeList edges = graph.edges();
  std::shuffle(edges.begin(), edges.end(), rng);
  return edges;
}

void assign_holdout(SplitSpec& split, const EdgeList& holdout) {
  for (std::size_t k = 0; k < holdout.size(); ++k) {
    (k % 2 == 0 ? split.val : split.test).push_back(holdout[k]);
  }
}

void finish(SplitSpec& split) {
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());
}

// Greedy removal in the given order, bounded by `budget`.
SplitSpec greedy_holdout(const BipartiteGraph& graph, const EdgeList& order, std::size_t budget) {
  std::vector<std::size_t> remaining(graph.num_nodes());
  for (NodeId v = 0; v < graph.num_nodes(); ++v) remaining[v] = graph.degree(v);

  SplitSpec split;
  split.num_users = graph.num_users();
  split.num_items = graph.num_items();
  EdgeList holdout;
  for (const auto& e : order) {
    if (holdout.size() < budget && remaining[e.user] > 1 && remaining[e.item] > 1) {
      --remaining[e.user];
      --remaining[e.item];
      holdout.push_back(e);
    } else {
      split.train.push_back(e);
    }
  }
  assign_holdout(split, holdout);
  return split;
}

}  // namespace

std::string to_string(SplitKind kind) {
  switch (kind) {
    case SplitKind::Normal:
      return "normal";
    case SplitKind::Sparse:
      return "sparse";
    case SplitKind::SparsityLevel:
      return "sparsity-level";
  }
  return "unknown";
}

SplitSpec normal_split(const BipartiteGraph& graph, double train_frac, std::uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw DomainError("train_frac must lie in (0, 1)");
  }
  if (graph.edge_count() == 0) throw DomainError("cannot split an empty graph");
  Rng rng = make_stream({seed, stream::kSplit});
  const auto order = shuffled_edges(graph, rng);
  const auto budget = static_cast<std::size_t>(
      std::llround((1.0 - train_frac) * static_cast<double>(graph.edge_count())));
  SplitSpec split = greedy_holdout(graph, order, budget);
  split.seed = seed;
  split.kind = SplitKind::Normal;
  finish(split);
  return split;
}

SplitSpec sparse_split(const BipartiteGraph& graph, std::uint64_t seed) {
  if (graph.edge_count() == 0) throw DomainError("cannot split an empty graph");
  Rng rng = make_stream({seed, stream::kSplit});
  const auto order = shuffled_edges(graph, rng);
  SplitSpec split = greedy_holdout(graph, order, order.size());
  split.seed = seed;
  split.kind = SplitKind::Sparse;
  finish(split);
  return split;
}

NecessarySplit necessary_edges(const BipartiteGraph& train_graph, std::uint64_t seed) {
  Rng rng = make_stream({seed, stream::kLevels});
  const auto order = shuffled_edges(train_graph, rng);
  std::vector<char> covered(train_graph.num_nodes(), 0);
  std::vector<char> taken(order.size(), 0);

  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& e = order[k];
    if (!covered[e.user] && !covered[e.item]) {
      covered[e.user] = covered[e.item] = 1;
      taken[k] = 1;
    }
  }
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& e = order[k];
    if (!taken[k] && (!covered[e.user] || !covered[e.item])) {
      covered[e.user] = covered[e.item] = 1;
      taken[k] = 1;
    }
  }

  NecessarySplit out;
  for (std::size_t k = 0; k < order.size(); ++k) {
    (taken[k] ? out.necessary : out.additional).push_back(order[k]);
  }
  return out;
}

std::vector<EdgeList> sparsity_levels(const BipartiteGraph& train_graph,
                                      std::span<const double> fractions, std::uint64_t seed) {
  const auto parts = necessary_edges(train_graph, seed);
  const double additional = static_cast<double>(parts.additional.size());
  std::vector<EdgeList> levels;
  levels.reserve(fractions.size());
  for (double f : fractions) {
    if (!(f >= 0.0 && f <= 1.0)) throw DomainError("sparsity fractions must lie in [0, 1]");
    const auto removed = static_cast<std::size_t>(std::llround(f * additional));
    EdgeList level = parts.necessary;
    level.insert(level.end(), parts.additional.begin() + static_cast<std::ptrdiff_t>(removed),
                 parts.additional.end());
    std::sort(level.begin(), level.end());
    levels.push_back(std::move(level));
  }
  return levels;
}

SplitSpec with_training_level(const SplitSpec& base, EdgeList train, int level) {
  SplitSpec split = base;
  split.train = std::move(train);
  std::sort(split.train.begin(), split.train.end());
  split.kind = level == 1 ? base.kind : SplitKind::SparsityLevel;
  split.level = level;
  return split;
}

void validate_split(const BipartiteGraph& graph, const SplitSpec& split) {
  if (split.num_users != graph.num_users() || split.num_items != graph.num_items()) {
    throw DomainError("split was made for a graph of a different size");
  }
  auto check_sorted_unique = [](const EdgeList& edges, const char* name) {
    if (!std::is_sorted(edges.begin(), edges.end()) ||
        std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
      throw DomainError(std::string(name) + " edges must be sorted and unique");
    }
  };
  check_sorted_unique(split.train, "train");
  check_sorted_unique(split.val, "val");
  check_sorted_unique(split.test, "test");

  EdgeList all;
  all.reserve(split.train.size() + split.val.size() + split.test.size());
  all.insert(all.end(), split.train.begin(), split.train.end());
  all.insert(all.end(), split.val.begin(), split.val.end());
  all.insert(all.end(), split.test.begin(), split.test.end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw DomainError("train, val and test edge sets overlap");
  }
  for (const auto& e : all) {
    if (!graph.has_edge(e.user, e.item)) throw DomainError("split edge missing from the graph");
  }
  if (split.kind != SplitKind::SparsityLevel && all.size() != graph.edge_count()) {
    throw DomainError("split does not cover every graph edge");
  }

  std::vector<std::size_t> train_degree(graph.num_nodes(), 0);
  for (const auto& e : split.train) {
    ++train_degree[e.user];
    ++train_degree[e.item];
  }
  for (NodeId v = 0; v < graph.num_nodes(); ++v) {
    if (graph.degree(v) > 0 && train_degree[v] == 0) {
      throw DomainError("node " + std::to_string(v) + " has no training edge");
    }
  }
}

BipartiteGraph training_graph(const SplitSpec& split) {
  return build_graph(split.train, split.num_users, split.num_items);
}

namespace {

void write_edges(const std::filesystem::path& path, const EdgeList& edges) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path.string());
  for (const auto& e : edges) out << e.user << '\t' << e.item << '\n';
}

EdgeList read_edges(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path.string());
  EdgeList edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    long long u = -1, i = -1;
    if (!(row >> u >> i) || u < 0 || i < 0) {
      throw ParseError(lineno, path.filename().string() + ": expected \"u<TAB>i\"");
    }
    edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(i)});
  }
  return edges;
}

}  // namespace

void save_split(const std::string& dir, const SplitSpec& split) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_edges(fs::path(dir) / "train.tsv", split.train);
  write_edges(fs::path(dir) / "val.tsv", split.val);
  write_edges(fs::path(dir) / "test.tsv", split.test);
  std::ofstream meta(fs::path(dir) / "split.meta");
  meta << "kind=" << to_string(split.kind) << '\n'
       << "level=" << split.level << '\n'
       << "seed=" << split.seed << '\n'
       << "num_users=" << split.num_users << '\n'
       << "num_items=" << split.num_items << '\n'
       << "train=" << split.train.size() << '\n'
       << "val=" << split.val.size() << '\n'
       << "test=" << split.test.size() << '\n';
}

SplitSpec load_split(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream meta(fs::path(dir) / "split.meta");
  if (!meta) throw DomainError("cannot open " + (fs::path(dir) / "split.meta").string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(meta, line)) {
    auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto need = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw DomainError("split.meta is missing " + key);
    return it->second;
  };

  SplitSpec split;
  const auto& kind = need("kind");
  if (kind == "normal") {
    split.kind = SplitKind::Normal;
  } else if (kind == "sparse") {
    split.kind = SplitKind::Sparse;
  } else if (kind == "sparsity-level") {
    split.kind = SplitKind::SparsityLevel;
  } else {
    throw DomainError("unknown split kind " + kind);
  }
  split.level = std::stoi(need("level"));
  split.seed = std::stoull(need("seed"));
  split.num_users = std::stoull(need("num_users"));
  split.num_items = std::stoull(need("num_items"));
  split.train = read_edges(fs::path(dir) / "train.tsv");
  split.val = read_edges(fs::path(dir) / "val.tsv");
  split.test = read_edges(fs::path(dir) / "test.tsv");
  if (split.train.size() != std::stoull(need("train")) ||
      split.val.size() != std::stoull(need("val")) ||
      split.test.size() != std::stoull(need("test"))) {
    throw DomainError("split files disagree with split.meta counts");
  }
  finish(split);
  return split;
}

}  // namespace lgcf
