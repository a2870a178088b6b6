#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "lgcf/checkpoint.hpp"
#include "lgcf/embedding.hpp"
#include "lgcf/errors.hpp"
#include "lgcf/model_gradcheck.hpp"
#include "lgcf/models.hpp"
#include "lgcf/split.hpp"
#include "lgcf/synthetic.hpp"
#include "lgcf/train.hpp"
#include "oracles.hpp"

using namespace lgcf;

namespace {

EmbeddingTable random_table(std::size_t n, std::size_t m, std::size_t d, std::uint64_t seed) {
  Rng rng = make_stream({seed});
  return EmbeddingTable::normal(n, m, d, 1.0, rng);
}

SplitSpec train_only(const BipartiteGraph& g) {
  SplitSpec s;
  s.train = g.edges();
  s.num_users = g.num_users();
  s.num_items = g.num_items();
  return s;
}

TrainConfig small_config() {
  TrainConfig tc;
  tc.epochs = 3;
  tc.batch_size = 16;
  tc.model.gnn = GnnShape{16, 8, 2};
  tc.model.walk.walk_len = 10;
  tc.model.walk.max_nodes = 20;
  tc.model.embedding_dim = 8;
  tc.model.lightgcn_layers = 2;
  tc.validation.n_negatives = 20;
  return tc;
}

}  // namespace

TEST(ModelKind, RoundTripsThroughNames) {
  for (auto k : {ModelKind::Lgcf, ModelKind::Mf, ModelKind::LightGcn, ModelKind::LgcfEmb,
                 ModelKind::LgcfEns}) {
    EXPECT_EQ(parse_model_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_model_kind("ngcf"), DomainError);
}

// ---- embedding scorers ----

TEST(MfScore, Examples) {
  auto t = EmbeddingTable::zeros(1, 1, 2);
  const NodeId u = 0, i = 1;
  t.row(u)[0] = 1.0;
  t.row(i)[1] = 1.0;
  EXPECT_EQ(mf_score(t, u, i), 0.0);
  t.row(i)[0] = 1.0;
  t.row(i)[1] = 0.0;
  EXPECT_EQ(mf_score(t, u, i), 1.0);
  t.row(u)[0] = 1.0;
  t.row(u)[1] = 2.0;
  t.row(i)[0] = 3.0;
  t.row(i)[1] = -1.0;
  EXPECT_EQ(mf_score(t, u, i), 1.0);
}

TEST(LightGcn, ZeroLayersIsIdentity) {
  std::mt19937_64 rng(1);
  const auto g = build_graph(oracle::random_edges(6, 7, 0.4, rng), 6, 7);
  const auto t = random_table(6, 7, 3, 1);
  const auto out = lightgcn_propagate(g, t, 0);
  EXPECT_EQ(out.users, t.users);
  EXPECT_EQ(out.items, t.items);
}

TEST(LightGcn, SingleEdgeByHand) {
  const auto g = build_graph({{0, 1}}, 1, 1);
  auto t = EmbeddingTable::zeros(1, 1, 2);
  t.row(0)[0] = 1.0;
  t.row(1)[1] = 1.0;
  const auto out = lightgcn_propagate(g, t, 1);
  EXPECT_NEAR(out.row(0)[0], 0.5, 1e-15);
  EXPECT_NEAR(out.row(0)[1], 0.5, 1e-15);
}

TEST(LightGcn, IsolatedNodeKeepsLayerZeroShare) {
  const auto g = build_graph({{0, 2}}, 2, 1);  // user 1 isolated
  const auto t = random_table(2, 1, 3, 2);
  const auto out = lightgcn_propagate(g, t, 3);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(out.row(1)[j], t.row(1)[j] / 4.0, 1e-15);
}

TEST(LightGcn, MatchesDenseOracle) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + rng() % 8, m = 2 + rng() % 8;
    const auto g = build_graph(oracle::random_edges(n, m, 0.35, rng), n, m);
    const auto t = random_table(n, m, 4, trial);
    for (std::size_t layers : {1u, 2u, 3u}) {
      const auto got = oracle::stacked(lightgcn_propagate(g, t, layers));
      const auto ref = oracle::lightgcn(g, oracle::stacked(t), layers);
      for (std::size_t r = 0; r < n + m; ++r) {
        for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(got[r][c], ref[r][c], 1e-12);
      }
    }
  }
}

TEST(LightGcn, PermutationEquivariant) {
  // Relabel users and items, propagate, map back: same rows.
  std::mt19937_64 rng(3);
  const std::size_t n = 6, m = 5;
  const auto edges = oracle::random_edges(n, m, 0.4, rng);
  const auto t = random_table(n, m, 3, 3);
  std::vector<NodeId> pu(n), pi(m);
  std::iota(pu.begin(), pu.end(), 0);
  std::iota(pi.begin(), pi.end(), 0);
  std::shuffle(pu.begin(), pu.end(), rng);
  std::shuffle(pi.begin(), pi.end(), rng);
  auto map = [&](NodeId v) { return v < n ? pu[v] : static_cast<NodeId>(n + pi[v - n]); };
  EdgeList moved;
  for (const auto& e : edges) moved.push_back({map(e.user), map(e.item)});
  auto t2 = EmbeddingTable::zeros(n, m, 3);
  for (NodeId v = 0; v < n + m; ++v) {
    std::copy(t.row(v).begin(), t.row(v).end(), t2.row(map(v)).begin());
  }
  const auto a = lightgcn_propagate(build_graph(edges, n, m), t, 2);
  const auto b = lightgcn_propagate(build_graph(moved, n, m), t2, 2);
  for (NodeId v = 0; v < n + m; ++v) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(a.row(v)[j], b.row(map(v))[j], 1e-12);
  }
}

// ---- LGCF scoring ----

TEST(LgcfScore, ZeroScoringVectorGivesHalf) {
  std::mt19937_64 rng(4);
  const auto g = build_graph(oracle::random_edges(8, 8, 0.3, rng), 8, 8);
  Rng init = make_stream({4});
  auto p = GnnParameters::init(GnnShape{16, 8, 3}, init);
  std::fill(p.scoring.begin(), p.scoring.end(), 0.0);
  for (NodeId u = 0; u < 8; ++u) {
    Rng r = make_stream({u});
    EXPECT_EQ(lgcf_score(g, u, 8 + u, p, WalkConfig{}, LabelEncoding{16}, r), 0.5);
  }
}

TEST(LgcfScore, DeterministicForSameStream) {
  std::mt19937_64 rng(5);
  const auto g = build_graph(oracle::random_edges(8, 8, 0.3, rng), 8, 8);
  Rng init = make_stream({5});
  const auto p = GnnParameters::init(GnnShape{16, 8, 3}, init);
  Rng a = extraction_stream(1, 0, 9, 0), b = extraction_stream(1, 0, 9, 0);
  EXPECT_EQ(lgcf_score(g, 0, 9, p, WalkConfig{}, LabelEncoding{16}, a),
            lgcf_score(g, 0, 9, p, WalkConfig{}, LabelEncoding{16}, b));
}

TEST(LgcfEmbScore, Examples) {
  const std::vector<double> zero_h = {0, 0, 0}, zero_x = {0, 0};
  const std::vector<double> joint = {0.3, -0.2, 0.5, 1.0, -1.0};
  EXPECT_EQ(joint_score(zero_x, zero_h, zero_h, joint), 0.5);
  // Zero weights on the embedding half: only the pooled GCN part counts.
  const std::vector<double> hu = {1, 2, 3}, hi = {4, 5, 6}, x = {0.7, 0.1};
  const std::vector<double> masked = {0, 0, 0, 1.0, -1.0};
  EXPECT_DOUBLE_EQ(joint_score(x, hu, hi, masked), sigmoid(0.7 - 0.1));
  const std::vector<double> short_joint = {1.0, 2.0};
  EXPECT_THROW(joint_score(x, hu, hi, short_joint), ContractViolation);
}

TEST(LgcfEmbScore, GradientsMatchFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = check_lgcf_emb_gradients(seed, InstanceConfig{});
    EXPECT_TRUE(r.passed) << "seed " << seed << " rel err " << r.max_rel_error;
  }
}

TEST(LgcfEnsScore, Examples) {
  const std::vector<double> hu = {0.3}, hi = {1.0};
  EXPECT_EQ(lgcf_ens_score(0.6, hu, hi, 0.0), 0.6);
  EXPECT_DOUBLE_EQ(lgcf_ens_score(0.6, hu, hi, 1.0), 0.9);
}

TEST(LgcfEnsScore, ZeroLambdaRanksLikeLgcf) {
  std::mt19937_64 rng(6);
  const auto g = build_graph(oracle::random_edges(10, 30, 0.2, rng), 10, 30);
  const auto tc = small_config();
  Model lgcf = init_model(ModelKind::Lgcf, 10, 30, tc);
  Model ens = init_model(ModelKind::LgcfEns, 10, 30, tc);
  ens.gnn = lgcf.gnn;
  ens.seed = lgcf.seed;
  ens.lambda = 0.0;
  const ModelScorer a(lgcf, g), b(ens, g);
  std::vector<NodeId> items(30);
  std::iota(items.begin(), items.end(), 10);
  for (NodeId u = 0; u < 10; ++u) {
    std::vector<double> sa(30), sb(30);
    a.score(u, items, sa);
    b.score(u, items, sb);
    EXPECT_EQ(ranking(items, sa), ranking(items, sb));
  }
}

// ---- negative sampling ----

TEST(SampleNegative, ForcedChoice) {
  const auto g = build_graph({{0, 1}, {0, 2}, {0, 4}}, 1, 4);
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng = make_stream({s});
    EXPECT_EQ(sample_negative(g, 0, rng), 3u);
  }
}

TEST(SampleNegative, UserWithEveryItemIsDomainError) {
  const auto g = build_graph({{0, 1}, {0, 2}}, 1, 2);
  Rng rng = make_stream({1});
  EXPECT_THROW(sample_negative(g, 0, rng), DomainError);
}

TEST(SampleNegative, UniformOverNonInteracted) {
  // User 0 holds items 0..9 of 20; the other 10 should each get ~1000 of 10^4 draws.
  EdgeList edges;
  for (NodeId k = 0; k < 10; ++k) edges.push_back({0, 1 + k});
  const auto g = build_graph(edges, 1, 20);
  Rng rng = make_stream({7});
  std::map<NodeId, int> counts;
  for (int d = 0; d < 10000; ++d) ++counts[sample_negative(g, 0, rng)];
  ASSERT_EQ(counts.size(), 10u);
  double chi2 = 0.0;
  for (auto [item, c] : counts) {
    EXPECT_GE(item, 11u);
    chi2 += (c - 1000.0) * (c - 1000.0) / 1000.0;
  }
  EXPECT_LT(chi2, 27.88);  // 9 degrees of freedom, p = 0.001
}

TEST(SampleNegative, NeverATrainPositive) {
  std::mt19937_64 gen(8);
  const auto g = build_graph(oracle::random_edges(5, 40, 0.7, gen), 5, 40);
  Rng rng = make_stream({8});
  for (int d = 0; d < 100000; ++d) {
    const NodeId u = static_cast<NodeId>(d % 5);
    if (g.degree(u) == 40) continue;
    EXPECT_FALSE(g.has_edge(u, sample_negative(g, u, rng)));
  }
}

// ---- parameter counts ----

TEST(ParamCount, Formulas) {
  ParamShape s{GnnShape{64, 32, 3}, 100, 100, 32};
  EXPECT_EQ(param_count(ModelKind::Lgcf, s), 4128u);
  EXPECT_EQ(param_count(ModelKind::Mf, s), 6400u);
  EXPECT_EQ(param_count(ModelKind::LightGcn, s), 6400u);
  EXPECT_EQ(param_count(ModelKind::LgcfEmb, s), 4128u + 6400u + 64u);
  EXPECT_EQ(param_count(ModelKind::LgcfEns, s), 4128u + 6400u);
  s.num_users = 10000;
  EXPECT_EQ(param_count(ModelKind::Mf, s), 323200u);
  EXPECT_EQ(param_count(ModelKind::Lgcf, s), 4128u);
  s.num_users = 1000000;
  EXPECT_EQ(param_count(ModelKind::Lgcf, s), 4128u);
}

TEST(ParamCount, MatchesInitializedModels) {
  const auto tc = small_config();
  const ParamShape s{tc.model.gnn, 7, 9, tc.model.embedding_dim};
  for (auto k : {ModelKind::Lgcf, ModelKind::Mf, ModelKind::LightGcn, ModelKind::LgcfEmb,
                 ModelKind::LgcfEns}) {
    const auto m = init_model(k, 7, 9, tc);
    std::size_t live = 0;
    if (k != ModelKind::Mf && k != ModelKind::LightGcn) live += m.gnn.count();
    if (k != ModelKind::Lgcf) live += m.embeddings.count();
    live += m.joint.size();
    EXPECT_EQ(live, param_count(k, s)) << to_string(k);
  }
}

// ---- training ----

TEST(Train, SingleEdgeStepDescends) {
  // One user, items 1 and 2, edge (0, 1): the only negative is item 2.
  const auto g = build_graph({{0, 1}}, 1, 2);
  auto tc = small_config();
  tc.epochs = 1;
  tc.adam.lr = 0.05;
  for (auto kind : {ModelKind::Lgcf, ModelKind::Mf}) {
    const auto result = train(kind, g, train_only(g), tc);
    ASSERT_EQ(result.history.size(), 1u);
    const double before = result.history[0].train_loss;
    double after = 0.0;
    if (kind == ModelKind::Lgcf) {
      const auto pos = localized_graph(g, 0, 1, tc.model.walk, tc.master_seed, 1);
      const auto neg = localized_graph(g, 0, 2, tc.model.walk, tc.master_seed, 1);
      after = lgcf_triple(pos, neg, result.model.gnn, tc.model.encoding(), nullptr);
    } else {
      after = embedding_triple(result.model.embeddings, Triple{0, 1, 2}, nullptr);
    }
    EXPECT_LT(after, before) << to_string(kind);
    EXPECT_LT(after, std::log(2.0)) << to_string(kind);
  }
}

TEST(Train, SmallLrStepDecreasesBatchLoss) {
  std::mt19937_64 rng(9);
  const auto g = build_graph(oracle::random_edges(8, 8, 0.4, rng), 8, 8);
  const auto tc = small_config();
  Model m = init_model(ModelKind::Lgcf, 8, 8, tc);
  std::vector<std::pair<LocalizedGraph, LocalizedGraph>> batch;
  for (const auto& e : g.edges()) {
    Rng r = make_stream({e.user, e.item});
    if (g.degree(e.user) == 8) continue;
    const NodeId neg = sample_negative(g, e.user, r);
    batch.emplace_back(localized_graph(g, e.user, e.item, tc.model.walk, 1, 0),
                       localized_graph(g, e.user, neg, tc.model.walk, 1, 0));
  }
  const auto enc = tc.model.encoding();
  auto batch_loss = [&](GnnGradients* grads) {
    double total = 0.0;
    for (const auto& [p, n] : batch) total += lgcf_triple(p, n, m.gnn, enc, grads);
    return total;
  };
  auto g0 = GnnGradients::zeros_like(m.gnn);
  const double before = batch_loss(&g0);
  AdamState adam;
  adam.config.lr = 1e-4;
  adam_step(m.gnn, g0, adam);
  EXPECT_LT(batch_loss(nullptr), before);
}

TEST(Train, SameSeedSameHistoryAndParameters) {
  const auto g = make_synthetic(20, 20, 0.3, 0.05, 3);
  const auto split = normal_split(g, 0.8, 3);
  auto tc = small_config();
  for (auto kind : {ModelKind::Lgcf, ModelKind::LightGcn, ModelKind::LgcfEmb}) {
    auto a = train(kind, g, split, tc);
    tc.threads = 3;
    auto b = train(kind, g, split, tc);
    tc.threads = 1;
    ASSERT_EQ(a.history.size(), b.history.size());
    for (std::size_t e = 0; e < a.history.size(); ++e) {
      EXPECT_EQ(a.history[e].train_loss, b.history[e].train_loss);
      EXPECT_EQ(a.history[e].val_hr10, b.history[e].val_hr10);
    }
    EXPECT_EQ(a.model.gnn.weights, b.model.gnn.weights);
    EXPECT_EQ(a.model.embeddings.users, b.model.embeddings.users);
  }
}

TEST(Train, SeparableToyRanksPositiveFirst) {
  // User 0 likes item 4, which shares users 1..3 with it; item 7 is isolated.
  const auto g = build_graph({{0, 4}, {1, 4}, {2, 4}, {3, 4}, {1, 5}, {2, 5}, {3, 6}}, 4, 4);
  auto tc = small_config();
  tc.epochs = 60;
  tc.adam.lr = 0.01;
  const auto result = train(ModelKind::Lgcf, g, train_only(g), tc);
  const ModelScorer scorer(result.model, g);
  const std::vector<NodeId> items = {4, 7};
  std::vector<double> s(2);
  scorer.score(0, items, s);
  EXPECT_GT(s[0], s[1]);
}

TEST(Train, WithinBlockScoresExceedCrossBlock) {
  const std::size_t n = 40, m = 40;
  const auto g = make_synthetic(n, m, 0.25, 0.02, 11);
  const auto split = normal_split(g, 0.9, 11);
  auto tc = small_config();
  tc.epochs = 8;
  tc.adam.lr = 0.01;
  const auto result = train(ModelKind::Lgcf, g, split, tc);
  const auto tg = training_graph(split);
  const ModelScorer scorer(result.model, tg);
  double within = 0.0, cross = 0.0;
  std::size_t nw = 0, nc = 0;
  std::vector<NodeId> items(m);
  std::iota(items.begin(), items.end(), static_cast<NodeId>(n));
  for (NodeId u = 0; u < n; ++u) {
    std::vector<double> s(m);
    scorer.score(u, items, s);
    for (std::size_t k = 0; k < m; ++k) {
      if (tg.has_edge(u, items[k])) continue;
      if (synthetic_block(u, n, m) == synthetic_block(items[k], n, m)) {
        within += s[k];
        ++nw;
      } else {
        cross += s[k];
        ++nc;
      }
    }
  }
  EXPECT_GT(within / nw, cross / nc);
}

TEST(Train, EnsembleFixedLambdaAndGrid) {
  const auto g = make_synthetic(20, 20, 0.3, 0.05, 5);
  const auto split = normal_split(g, 0.8, 5);
  auto tc = small_config();
  tc.epochs = 2;
  tc.lambda = 0.7;
  auto fixed = train(ModelKind::LgcfEns, g, split, tc);
  EXPECT_EQ(fixed.model.lambda, 0.7);
  EXPECT_EQ(fixed.optimizers.size(), 2u);
  tc.lambda.reset();
  auto searched = train(ModelKind::LgcfEns, g, split, tc);
  EXPECT_NE(std::find(tc.lambda_grid.begin(), tc.lambda_grid.end(), searched.model.lambda),
            tc.lambda_grid.end());
}

TEST(Train, InvalidInputsAreDomainErrors) {
  const auto g = build_graph({{0, 2}, {1, 3}}, 2, 2);
  auto split = train_only(g);
  split.train.push_back({0, 3});
  EXPECT_THROW(train(ModelKind::Mf, g, split, small_config()), DomainError);
  auto tc = small_config();
  tc.batch_size = 0;
  EXPECT_THROW(train(ModelKind::Mf, g, train_only(g), tc), DomainError);
  tc = small_config();
  tc.lambda = std::nan("");
  EXPECT_THROW(train(ModelKind::LgcfEns, g, train_only(g), tc), DomainError);
}

TEST(Train, HistoryIsJsonLines) {
  std::vector<EpochRecord> h(2);
  h[0].phase = "lgcf";
  h[0].epoch = 1;
  h[0].train_loss = 0.5;
  h[1].phase = "lgcf";
  h[1].epoch = 2;
  h[1].val_hr10 = 0.25;
  std::ostringstream out;
  write_history(out, h);
  std::istringstream in(out.str());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("train_loss"));
    EXPECT_TRUE(j.contains("val_hr10"));
    EXPECT_TRUE(j.contains("wall_ms"));
    ++lines;
  }
  EXPECT_EQ(lines, 2);
}

// ---- checkpoints ----

TEST(Checkpoint, RoundTripIsExact) {
  const auto g = make_synthetic(12, 12, 0.4, 0.1, 2);
  const auto split = normal_split(g, 0.8, 2);
  auto tc = small_config();
  tc.epochs = 1;
  tc.lambda = 1.25;
  for (auto kind : {ModelKind::Lgcf, ModelKind::Mf, ModelKind::LightGcn, ModelKind::LgcfEmb,
                    ModelKind::LgcfEns}) {
    auto r = train(kind, g, split, tc);
    const Checkpoint ckpt{r.model, r.optimizers};
    std::stringstream a;
    write_checkpoint(a, ckpt);
    const auto back = read_checkpoint(a);
    EXPECT_EQ(back.model.kind, kind);
    EXPECT_EQ(back.model.seed, r.model.seed);
    EXPECT_EQ(back.model.lambda, r.model.lambda);
    EXPECT_EQ(back.model.gnn.weights, r.model.gnn.weights);
    EXPECT_EQ(back.model.gnn.scoring, r.model.gnn.scoring);
    EXPECT_EQ(back.model.embeddings.users, r.model.embeddings.users);
    EXPECT_EQ(back.model.embeddings.items, r.model.embeddings.items);
    EXPECT_EQ(back.model.joint, r.model.joint);
    ASSERT_EQ(back.optimizers.size(), r.optimizers.size());
    for (std::size_t k = 0; k < back.optimizers.size(); ++k) {
      EXPECT_EQ(back.optimizers[k].first, r.optimizers[k].first);
      EXPECT_EQ(back.optimizers[k].second, r.optimizers[k].second);
      EXPECT_EQ(back.optimizers[k].step, r.optimizers[k].step);
    }
    std::stringstream b;
    write_checkpoint(b, back);
    EXPECT_EQ(a.str(), b.str());
  }
}

TEST(Checkpoint, MalformedInputIsParseError) {
  std::stringstream bad("lgcf-checkpoint 1\nkind banana\n");
  EXPECT_THROW(read_checkpoint(bad), ParseError);
  std::stringstream wrong_version("lgcf-checkpoint 99\n");
  EXPECT_THROW(read_checkpoint(wrong_version), ParseError);
  std::stringstream empty;
  EXPECT_THROW(read_checkpoint(empty), ParseError);
}
