#include "cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <set>
#include <ostream>
#include <sstream>
#include <string_view>

#include <CLI11.hpp>

#include "lgcf/cases.hpp"
#include "lgcf/checkpoint.hpp"
#include "lgcf/errors.hpp"
#include "lgcf/evaluate.hpp"
#include "lgcf/graph.hpp"
#include "lgcf/ingest.hpp"
#include "lgcf/model_gradcheck.hpp"
#include "lgcf/parallel.hpp"
#include "lgcf/probe.hpp"
#include "lgcf/report.hpp"
#include "lgcf/split.hpp"
#include "lgcf/sweep.hpp"
#include "lgcf/synthetic.hpp"
#include "lgcf/train.hpp"

namespace lgcf::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kUsage =
    "usage: lgcf <command> [options]\n"
    "\n"
    "commands:\n"
    "  ingest        delimited interaction file -> graph.tsv + keys.tsv\n"
    "  synth         two-block synthetic graph -> graph.tsv\n"
    "  split         graph -> train/val/test split (normal or sparse)\n"
    "  train         split -> model.ckpt + history.jsonl\n"
    "  eval          split + checkpoint(s) -> report.json\n"
    "  sweep         retrain and evaluate across nested sparsity levels\n"
    "  probe-degree  evaluation broken down by endpoint degree\n"
    "  dump-cases    localized graphs of pairs one model gets and another misses\n"
    "  gradcheck     analytic vs finite-difference gradients on random instances\n"
    "\n"
    "Run 'lgcf <command> --help' for the options of a command. Every option can\n"
    "also come from a key=value file given with --config; flags win over the file.\n";

const char* kConfigFile = "config.resolved";

// Options every command shares.
struct Common {
  std::string out;
  bool force = false;
  unsigned threads = 0;

  unsigned worker_count() const { return threads ? threads : default_threads(); }
};

void add_common(CLI::App& app, Common& c, bool out_required) {
  app.set_config("--config", "", "key=value settings file; command-line flags take precedence");
  app.allow_config_extras(false);
  auto* out = app.add_option("--out", c.out, "output directory");
  if (out_required) out->required();
  app.add_flag("--force", c.force, "allow writing into an existing non-empty output directory");
  app.add_option("--threads", c.threads, "worker cap; 0 reads LGCF_THREADS, else all cores")
      ->capture_default_str();
}

void prepare_out(const Common& c) {
  const fs::path dir(c.out);
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw DomainError(c.out + " exists and is not a directory");
    if (!fs::is_empty(dir) && !c.force) {
      throw DomainError("output directory " + c.out + " is not empty (use --force to reuse it)");
    }
  }
  fs::create_directories(dir);
}

std::string out_path(const Common& c, const std::string& name) {
  return (fs::path(c.out) / name).string();
}

std::uint64_t fnv1a(std::string_view text, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

// Digest of an input file, or of every file in an input directory except
// the config echo. Inputs are identified by content, not location.
std::string content_digest(const std::string& path) {
  std::uint64_t h = fnv1a("");
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().filename() != kConfigFile) {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) h = fnv1a(slurp(f), fnv1a(f.filename().string(), h));
  } else {
    h = fnv1a(slurp(path), h);
  }
  std::ostringstream ss;
  ss << std::hex << h;
  return ss.str();
}

// Resolved settings that affect results. Output location and worker count
// are left out and input paths are replaced by content digests, so reruns
// elsewhere hash the same.
std::string resolved_config(const CLI::App& app) {
  static const std::set<std::string> kInputs = {"input",        "graph",       "split",
                                                "checkpoint",   "checkpoint-a", "checkpoint-b"};
  std::istringstream in(app.config_to_str(true, false));
  std::string line, kept;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    const auto key = line.substr(0, eq);
    if (key == "out" || key == "force" || key == "threads" || key == "config") continue;
    if (kInputs.count(key) && eq != std::string::npos) {
      // Value is "path" or ["path", ...].
      std::string digests;
      std::size_t pos = eq;
      while ((pos = line.find('"', pos + 1)) != std::string::npos) {
        const auto close = line.find('"', pos + 1);
        if (close == std::string::npos) break;
        const auto path = line.substr(pos + 1, close - pos - 1);
        if (!path.empty()) digests += content_digest(path) + ',';
        pos = close;
      }
      line = key + "=" + digests;
    }
    kept += line + '\n';
  }
  return kept;
}

std::string config_hash(const std::string& text) {
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << fnv1a(text);
  return ss.str();
}

// Every option with its effective value. Unset optional settings are
// omitted, so the file can be fed back through --config.
void write_resolved(const CLI::App& app, const Common& c) {
  std::ofstream out(out_path(c, kConfigFile));
  std::istringstream in(app.config_to_str(true, false));
  for (std::string line; std::getline(in, line);) {
    if (line.size() < 3 || line.compare(line.size() - 3, 3, "=\"\"") != 0) out << line << '\n';
  }
  if (!out) throw DomainError("cannot write " + out_path(c, kConfigFile));
}

template <class Fn>
void write_file(const std::string& path, Fn&& fn) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path);
  fn(out);
  if (!out) throw DomainError("write failed: " + path);
}

// ---- shared option groups ----

struct ProtocolOpts {
  EvalProtocol protocol;
};

void add_protocol(CLI::App& app, ProtocolOpts& p) {
  app.add_option("--negatives", p.protocol.n_negatives, "sampled negatives per test positive")
      ->capture_default_str();
  app.add_option("--ks", p.protocol.ks, "cutoffs for HR@K / NDCG@K")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--eval-seed", p.protocol.seed, "seed of the negative candidate streams")
      ->capture_default_str();
  app.add_flag("--full-ranking", p.protocol.full_ranking,
               "rank against every non-positive item instead of sampled negatives");
}

struct TrainOpts {
  TrainConfig tc;
  std::string model = "lgcf";
  std::string activation = "relu";
  bool keep_target_edge = false;
  std::optional<double> lambda;
};

void add_training(CLI::App& app, TrainOpts& o) {
  auto& tc = o.tc;
  app.add_option("--epochs", tc.epochs)->capture_default_str();
  app.add_option("--batch-size", tc.batch_size)->capture_default_str();
  app.add_option("--negatives-per-positive", tc.negatives_per_positive)->capture_default_str();
  app.add_option("--patience", tc.early_stop_patience, "validation rounds without improvement")
      ->capture_default_str();
  app.add_option("--eval-every", tc.eval_every, "epochs between validation rounds")
      ->capture_default_str();
  app.add_option("--seed", tc.master_seed, "master seed")->capture_default_str();
  app.add_option("--lr", tc.adam.lr)->capture_default_str();
  app.add_option("--beta1", tc.adam.beta1)->capture_default_str();
  app.add_option("--beta2", tc.adam.beta2)->capture_default_str();
  app.add_option("--adam-eps", tc.adam.eps)->capture_default_str();
  app.add_option("--l2", tc.l2, "L2 weight on embedding rows in a batch")->capture_default_str();
  app.add_option("--init-std", tc.init_std, "embedding init standard deviation")
      ->capture_default_str();
  app.add_option("--feature-width", tc.model.gnn.feature_width, "label one-hot width (label cap)")
      ->capture_default_str();
  app.add_option("--hidden", tc.model.gnn.hidden)->capture_default_str();
  app.add_option("--layers", tc.model.gnn.layers)->capture_default_str();
  app.add_option("--activation", o.activation, "relu | tanh | identity")->capture_default_str();
  app.add_option("--restart-prob", tc.model.walk.restart_prob)->capture_default_str();
  app.add_option("--walk-len", tc.model.walk.walk_len)->capture_default_str();
  app.add_option("--max-nodes", tc.model.walk.max_nodes)->capture_default_str();
  app.add_flag("--keep-target-edge", o.keep_target_edge,
               "leave the (user, item) edge inside its localized graph");
  app.add_option("--embedding-dim", tc.model.embedding_dim)->capture_default_str();
  app.add_option("--lightgcn-layers", tc.model.lightgcn_layers)->capture_default_str();
  app.add_option("--lambda", o.lambda, "lgcf-ens weight; grid-searched on validation if unset");
  app.add_option("--lambda-grid", tc.lambda_grid)->delimiter(',')->capture_default_str();
  app.add_flag("--cache-subgraphs", tc.cache_subgraphs,
               "extract each positive localized graph once instead of every epoch");
  app.add_option("--val-negatives", tc.validation.n_negatives)->capture_default_str();
  app.add_option("--val-seed", tc.validation.seed)->capture_default_str();
}

TrainConfig finish_training(TrainOpts& o, const Common& c) {
  TrainConfig tc = o.tc;
  tc.model.gnn.activation = parse_activation(o.activation);
  tc.model.walk.remove_target_edge = !o.keep_target_edge;
  tc.lambda = o.lambda;
  tc.threads = c.worker_count();
  tc.validation.ks = {10};
  tc.validate();
  return tc;
}

// The original graph of a stored split: the union of its three edge sets.
BipartiteGraph split_graph(const SplitSpec& split) {
  EdgeList all = split.train;
  all.insert(all.end(), split.val.begin(), split.val.end());
  all.insert(all.end(), split.test.begin(), split.test.end());
  std::sort(all.begin(), all.end());
  return build_graph(all, split.num_users, split.num_items);
}

SplitSpec load_checked_split(const std::string& dir) {
  const SplitSpec split = load_split(dir);
  validate_split(split_graph(split), split);
  return split;
}

std::string fmt_metric(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(4) << v;
  return ss.str();
}

void print_metrics(std::ostream& out, const std::vector<KMetrics>& metrics) {
  for (const auto& m : metrics) {
    out << "HR@" << m.k << ' ' << fmt_metric(m.hr.mean) << "  NDCG@" << m.k << ' '
        << fmt_metric(m.ndcg.mean) << '\n';
  }
}

// ---- commands ----
// Each command registers its options on `app` and returns the action to run
// once parsing succeeded.

using Action = std::function<int(std::ostream&)>;

Action cmd_ingest(CLI::App& app) {
  struct Opts {
    Common common;
    std::string input;
    std::string delimiter = "auto";
    std::size_t user_col = 0;
    std::size_t item_col = 1;
    std::optional<std::size_t> rating_col;
    std::optional<double> threshold;
  };
  auto o = std::make_shared<Opts>();
  app.description("Read a delimited interaction file into a graph.");
  app.add_option("--input", o->input, "interaction file")->required()->check(CLI::ExistingFile);
  app.add_option("--delimiter", o->delimiter, "auto | tab | comma | any single character")
      ->capture_default_str();
  app.add_option("--user-col", o->user_col)->capture_default_str();
  app.add_option("--item-col", o->item_col)->capture_default_str();
  app.add_option("--rating-col", o->rating_col, "needed with --threshold");
  app.add_option("--threshold", o->threshold, "keep rows with rating >= threshold");
  add_common(app, o->common, true);

  return [o, &app](std::ostream& out) {
    ColumnSpec spec;
    if (o->delimiter == "tab") {
      spec.delimiter = '\t';
    } else if (o->delimiter == "comma") {
      spec.delimiter = ',';
    } else if (o->delimiter != "auto") {
      if (o->delimiter.size() != 1) throw DomainError("delimiter must be a single character");
      spec.delimiter = o->delimiter[0];
    }
    spec.user_col = o->user_col;
    spec.item_col = o->item_col;
    spec.rating_col = o->rating_col;
    const auto result = ingest_interactions(o->input, spec, o->threshold);
    auto edges = result.edges;
    std::sort(edges.begin(), edges.end());
    const auto graph = build_graph(edges, result.num_users, result.num_items);

    prepare_out(o->common);
    write_resolved(app, o->common);
    save_graph(out_path(o->common, "graph.tsv"), graph);
    write_file(out_path(o->common, "keys.tsv"), [&](std::ostream& f) { write_key_map(f, result); });
    out << "users " << graph.num_users() << "  items " << graph.num_items() << "  edges "
        << graph.edge_count() << "  density " << density(graph) << '\n';
    return kExitOk;
  };
}

Action cmd_synth(CLI::App& app) {
  struct Opts {
    Common common;
    std::size_t users = 200;
    std::size_t items = 200;
    double p_in = 0.05;
    double p_out = 0.005;
    std::uint64_t seed = 1;
  };
  auto o = std::make_shared<Opts>();
  app.description("Generate a two-block bipartite stochastic block model.");
  app.add_option("--users", o->users, "total users, split into two blocks")->capture_default_str();
  app.add_option("--items", o->items, "total items, split into two blocks")->capture_default_str();
  app.add_option("--p-in", o->p_in, "same-block edge probability")->capture_default_str();
  app.add_option("--p-out", o->p_out, "cross-block edge probability")->capture_default_str();
  app.add_option("--seed", o->seed)->capture_default_str();
  add_common(app, o->common, true);

  return [o, &app](std::ostream& out) {
    const auto graph = make_synthetic(o->users, o->items, o->p_in, o->p_out, o->seed);
    prepare_out(o->common);
    write_resolved(app, o->common);
    save_graph(out_path(o->common, "graph.tsv"), graph);
    out << "users " << graph.num_users() << "  items " << graph.num_items() << "  edges "
        << graph.edge_count() << "  density " << density(graph) << '\n';
    return kExitOk;
  };
}

Action cmd_split(CLI::App& app) {
  struct Opts {
    Common common;
    std::string graph;
    std::string kind = "normal";
    double train_frac = 0.9;
    std::uint64_t seed = 1;
  };
  auto o = std::make_shared<Opts>();
  app.description("Split a graph into train/val/test edge sets.");
  app.add_option("--graph", o->graph, "graph file (graph.tsv)")->required()->check(CLI::ExistingFile);
  app.add_option("--kind", o->kind, "normal | sparse")
      ->check(CLI::IsMember({"normal", "sparse"}))
      ->capture_default_str();
  app.add_option("--train-frac", o->train_frac, "target training share for normal splits")
      ->capture_default_str();
  app.add_option("--seed", o->seed)->capture_default_str();
  add_common(app, o->common, true);

  return [o, &app](std::ostream& out) {
    const auto graph = load_graph(o->graph);
    const SplitSpec split = o->kind == "sparse" ? sparse_split(graph, o->seed)
                                                : normal_split(graph, o->train_frac, o->seed);
    validate_split(graph, split);
    prepare_out(o->common);
    write_resolved(app, o->common);
    save_split(o->common.out, split);
    out << "train " << split.train.size() << "  val " << split.val.size() << "  test "
        << split.test.size() << '\n';
    return kExitOk;
  };
}

Action cmd_train(CLI::App& app) {
  struct Opts {
    Common common;
    TrainOpts train;
    std::string split;
    std::string graph;
  };
  auto o = std::make_shared<Opts>();
  app.description("Train one model kind on a split.");
  app.add_option("--split", o->split, "split directory")->required()->check(CLI::ExistingDirectory);
  app.add_option("--graph", o->graph, "original graph; defaults to the union of the split")
      ->check(CLI::ExistingFile);
  app.add_option("--model", o->train.model, "lgcf | mf | lightgcn | lgcf-emb | lgcf-ens")
      ->capture_default_str();
  add_training(app, o->train);
  add_common(app, o->common, true);

  return [o, &app](std::ostream& out) {
    const ModelKind kind = parse_model_kind(o->train.model);
    const TrainConfig tc = finish_training(o->train, o->common);
    const SplitSpec split = load_split(o->split);
    const BipartiteGraph graph = o->graph.empty() ? split_graph(split) : load_graph(o->graph);
    prepare_out(o->common);
    write_resolved(app, o->common);

    const auto result = train(kind, graph, split, tc);
    save_checkpoint(out_path(o->common, "model.ckpt"), {result.model, result.optimizers});
    write_file(out_path(o->common, "history.jsonl"),
               [&](std::ostream& f) { write_history(f, result.history); });

    std::optional<double> best;
    for (const auto& r : result.history) {
      if (r.val_hr10 && (!best || *r.val_hr10 > *best)) best = r.val_hr10;
    }
    out << to_string(kind) << ": " << result.history.size() << " epochs";
    if (best) out << ", best validation HR@10 " << fmt_metric(*best);
    if (kind == ModelKind::LgcfEns) out << ", lambda " << result.model.lambda;
    out << '\n';
    return kExitOk;
  };
}

Action cmd_eval(CLI::App& app) {
  struct Opts {
    Common common;
    ProtocolOpts protocol;
    std::string split;
    std::vector<std::string> checkpoints;
  };
  auto o = std::make_shared<Opts>();
  app.description("Rank test edges against sampled negatives; several checkpoints (one per seed) "
                  "are reported as mean and standard deviation.");
  app.add_option("--split", o->split, "split directory")->required()->check(CLI::ExistingDirectory);
  app.add_option("--checkpoint", o->checkpoints, "model checkpoint(s)")
      ->required()
      ->check(CLI::ExistingFile);
  add_protocol(app, o->protocol);
  add_common(app, o->common, true);

  return [o, &app](std::ostream& out) {
    auto protocol = o->protocol.protocol;
    protocol.threads = o->common.worker_count();
    protocol.validate();
    const SplitSpec split = load_checked_split(o->split);
    const BipartiteGraph train_graph = training_graph(split);
    prepare_out(o->common);
    write_resolved(app, o->common);

    std::vector<EvalReport> runs;
    std::vector<std::uint64_t> seeds;
    std::string model;
    for (const auto& path : o->checkpoints) {
      auto ckpt = load_checkpoint(path);
      const OwningScorer scorer(std::move(ckpt.model), train_graph);
      runs.push_back(evaluate(scorer, split, protocol));
      seeds.push_back(scorer.model().seed);
      if (model.empty()) model = scorer.name();
      if (model != scorer.name()) throw DomainError("checkpoints hold different model kinds");
    }
    EvalReport report = aggregate_reports(runs);
    report.metadata.model = model;
    report.metadata.seeds = seeds;
    report.metadata.seeds.push_back(protocol.seed);
    report.metadata.config_hash = config_hash(resolved_config(app));
    save_report(out_path(o->common, "report.json"), report);
    print_metrics(out, report.metrics);
    return kExitOk;
  };
}

Action cmd_sweep(CLI::App& app) {
  struct Opts {
    Common common;
    TrainOpts train;
    ProtocolOpts protocol;
    std::string split;
    std::vector<std::string> models = {"lgcf", "mf", "lightgcn"};
    std::vector<double> fractions = kDefaultLevelFractions;
  };
  auto o = std::make_shared<Opts>();
  app.description("Retrain and evaluate models on nested sparsity levels of a split.");
  app.add_option("--split", o->split, "split directory")->required()->check(CLI::ExistingDirectory);
  app.add_option("--models", o->models)->delimiter(',')->capture_default_str();
  app.add_option("--fractions", o->fractions, "share of the additional set removed per level")
      ->delimiter(',')
      ->capture_default_str();
  add_training(app, o->train);
  add_protocol(app, o->protocol);
  add_common(app, o->common, true);

  return [o, &app](std::ostream& out) {
    std::vector<ModelKind> kinds;
    for (const auto& m : o->models) kinds.push_back(parse_model_kind(m));
    const TrainConfig tc = finish_training(o->train, o->common);
    auto protocol = o->protocol.protocol;
    protocol.threads = o->common.worker_count();
    protocol.validate();
    const SplitSpec split = load_checked_split(o->split);
    const BipartiteGraph graph = split_graph(split);
    prepare_out(o->common);
    write_resolved(app, o->common);

    EvalReport report = sparsity_sweep(kinds, split, o->fractions, tc.master_seed, protocol,
                                       training_factory(graph, tc));
    report.metadata.config_hash = config_hash(resolved_config(app));
    save_report(out_path(o->common, "sweep.json"), report);
    write_file(out_path(o->common, "sweep.csv"),
               [&](std::ostream& f) { write_level_csv(f, report.levels); });
    write_level_csv(out, report.levels);
    return kExitOk;
  };
}

Action cmd_probe(CLI::App& app) {
  struct Opts {
    Common common;
    ProtocolOpts protocol;
    std::string split;
    std::string checkpoint;
    std::size_t groups = 5;
  };
  auto o = std::make_shared<Opts>();
  app.description("Evaluate test pairs grouped by the mean train degree of their endpoints.");
  app.add_option("--split", o->split, "split directory")->required()->check(CLI::ExistingDirectory);
  app.add_option("--checkpoint", o->checkpoint)->required()->check(CLI::ExistingFile);
  app.add_option("--groups", o->groups)->capture_default_str();
  add_protocol(app, o->protocol);
  add_common(app, o->common, true);

  return [o, &app](std::ostream& out) {
    auto protocol = o->protocol.protocol;
    protocol.threads = o->common.worker_count();
    protocol.validate();
    const SplitSpec split = load_checked_split(o->split);
    prepare_out(o->common);
    write_resolved(app, o->common);

    auto ckpt = load_checkpoint(o->checkpoint);
    const OwningScorer scorer(std::move(ckpt.model), training_graph(split));
    EvalReport report = degree_probe(scorer, split, protocol, o->groups);
    report.metadata.config_hash = config_hash(resolved_config(app));
    save_report(out_path(o->common, "probe.json"), report);
    write_file(out_path(o->common, "probe.csv"),
               [&](std::ostream& f) { write_group_csv(f, report.groups); });
    write_group_csv(out, report.groups);
    return kExitOk;
  };
}

Action cmd_dump(CLI::App& app) {
  struct Opts {
    Common common;
    ProtocolOpts protocol;
    std::string split;
    std::string checkpoint_a;
    std::string checkpoint_b;
    std::size_t k = 10;
    std::size_t max_cases = 20;
  };
  auto o = std::make_shared<Opts>();
  app.description("Dump localized graphs of test pairs model A ranks in the top k and model B "
                  "does not.");
  app.add_option("--split", o->split, "split directory")->required()->check(CLI::ExistingDirectory);
  app.add_option("--checkpoint-a", o->checkpoint_a)->required()->check(CLI::ExistingFile);
  app.add_option("--checkpoint-b", o->checkpoint_b)->required()->check(CLI::ExistingFile);
  app.add_option("--k", o->k)->capture_default_str();
  app.add_option("--max-cases", o->max_cases)->capture_default_str();
  add_protocol(app, o->protocol);
  add_common(app, o->common, true);

  return [o, &app](std::ostream& out) {
    auto protocol = o->protocol.protocol;
    protocol.threads = o->common.worker_count();
    protocol.validate();
    const SplitSpec split = load_checked_split(o->split);
    const BipartiteGraph train_graph = training_graph(split);
    prepare_out(o->common);
    write_resolved(app, o->common);

    auto a = load_checkpoint(o->checkpoint_a);
    auto b = load_checkpoint(o->checkpoint_b);
    CaseConfig cfg;
    cfg.walk = a.model.config.walk;
    cfg.seed = a.model.seed;
    cfg.k = o->k;
    cfg.max_cases = o->max_cases;
    const OwningScorer scorer_a(std::move(a.model), train_graph);
    const OwningScorer scorer_b(std::move(b.model), train_graph);
    const auto rows = dump_cases(scorer_a, scorer_b, split, protocol, cfg, o->common.out);
    out << rows.size() / 2 << " cases written to " << out_path(o->common, "manifest.csv") << '\n';
    return kExitOk;
  };
}

Action cmd_gradcheck(CLI::App& app) {
  struct Opts {
    Common common;
    std::uint64_t seed = 1;
    std::size_t instances = 1;
    std::string model = "lgcf";
    InstanceConfig instance;
    GradCheckOptions check;
  };
  auto o = std::make_shared<Opts>();
  app.description("Compare analytic gradients with central finite differences.");
  app.add_option("--seed", o->seed)->capture_default_str();
  app.add_option("--instances", o->instances, "random instances, seeds seed..seed+n-1")
      ->capture_default_str();
  app.add_option("--model", o->model, "lgcf | lgcf-emb")
      ->check(CLI::IsMember({"lgcf", "lgcf-emb"}))
      ->capture_default_str();
  app.add_option("--max-nodes", o->instance.max_nodes)->capture_default_str();
  app.add_option("--feature-width", o->instance.shape.feature_width)->capture_default_str();
  app.add_option("--hidden", o->instance.shape.hidden)->capture_default_str();
  app.add_option("--layers", o->instance.shape.layers)->capture_default_str();
  app.add_option("--step", o->check.step)->capture_default_str();
  app.add_option("--tolerance", o->check.tolerance)->capture_default_str();
  add_common(app, o->common, false);

  return [o, &app](std::ostream& out) {
    if (o->instances < 1) throw DomainError("--instances must be >= 1");
    GradCheckReport worst;
    worst.max_rel_error = -1.0;
    std::size_t checked = 0;
    bool passed = true;
    for (std::size_t k = 0; k < o->instances; ++k) {
      const std::uint64_t seed = o->seed + k;
      const auto r = o->model == "lgcf" ? check_lgcf_gradients(seed, o->instance, o->check)
                                        : check_lgcf_emb_gradients(seed, o->instance, o->check);
      checked += r.checked;
      passed = passed && r.passed;
      if (r.max_rel_error > worst.max_rel_error) worst = r;
    }
    std::ostringstream line;
    line << "max relative error " << std::scientific << std::setprecision(3)
         << worst.max_rel_error << " over " << checked << " coordinates in " << o->instances
         << " instance(s): " << (passed ? "PASS" : "FAIL") << '\n';
    out << line.str();
    if (!o->common.out.empty()) {
      prepare_out(o->common);
      write_resolved(app, o->common);
      write_file(out_path(o->common, "gradcheck.txt"), [&](std::ostream& f) { f << line.str(); });
    }
    return passed ? kExitOk : kExitDomain;
  };
}

using Builder = Action (*)(CLI::App&);

Builder find_command(const std::string& name) {
  static const std::vector<std::pair<std::string, Builder>> table = {
      {"ingest", cmd_ingest},   {"split", cmd_split},        {"synth", cmd_synth},
      {"train", cmd_train},     {"eval", cmd_eval},          {"sweep", cmd_sweep},
      {"probe-degree", cmd_probe}, {"dump-cases", cmd_dump}, {"gradcheck", cmd_gradcheck},
  };
  for (const auto& [n, b] : table) {
    if (n == name) return b;
  }
  return nullptr;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    err << kUsage;
    return kExitUsage;
  }
  const std::string& command = args.front();
  if (command == "--help" || command == "-h" || command == "help") {
    out << kUsage;
    return kExitOk;
  }
  const Builder builder = find_command(command);
  if (!builder) {
    err << "lgcf: unknown command '" << command << "'\n\n" << kUsage;
    return kExitUsage;
  }

  CLI::App app("", "lgcf " + command);
  const Action action = builder(app);
  std::vector<std::string> rest(args.rbegin(), args.rend() - 1);  // CLI11 wants reverse order
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "lgcf " << command << ": " << e.what() << "\n"
        << "Run 'lgcf " << command << " --help' for usage.\n";
    return kExitUsage;
  }

  try {
    return action(out);
  } catch (const ContractViolation& e) {
    err << "lgcf " << command << ": internal error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "lgcf " << command << ": " << e.what() << '\n';
  }
  return kExitDomain;
}

}  // namespace lgcf::cli
