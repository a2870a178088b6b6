#include <benchmark/benchmark.h>

#include <numeric>

#include "lgcf/evaluate.hpp"
#include "lgcf/gnn.hpp"
#include "lgcf/labeling.hpp"
#include "lgcf/models.hpp"
#include "lgcf/split.hpp"
#include "lgcf/subgraph.hpp"
#include "lgcf/synthetic.hpp"

using namespace lgcf;

namespace {

const BipartiteGraph& graph() {
  static const auto g = make_synthetic(1000, 1000, 0.01, 0.001, 1);
  return g;
}

LocalizedGraph sample_graph(std::uint64_t epoch) {
  return localized_graph(graph(), 0, 1000, WalkConfig{}, 1, epoch);
}

}  // namespace

static void BM_Extract(benchmark::State& state) {
  WalkConfig cfg;
  cfg.max_nodes = static_cast<std::size_t>(state.range(0));
  std::uint64_t epoch = 0;
  for (auto _ : state) {
    Rng rng = extraction_stream(1, 3, 1003, epoch++);
    benchmark::DoNotOptimize(extract(graph(), 3, 1003, cfg, rng));
  }
}
BENCHMARK(BM_Extract)->Arg(20)->Arg(50)->Arg(100);

static void BM_Label(benchmark::State& state) {
  auto lg = sample_graph(0);
  for (auto _ : state) {
    label_graph(lg);
    benchmark::DoNotOptimize(lg.labels.data());
  }
  state.counters["nodes"] = static_cast<double>(lg.size());
}
BENCHMARK(BM_Label);

static void BM_GcnForwardBackward(benchmark::State& state) {
  const auto lg = sample_graph(0);
  Rng init = make_stream({1});
  const auto params = GnnParameters::init(GnnShape{}, init);
  const LabelEncoding enc{};
  for (auto _ : state) {
    const auto scored = score_graph(lg, params, enc);
    auto grads = GnnGradients::zeros_like(params);
    backward_score(scored, params, 1.0, grads);
    benchmark::DoNotOptimize(grads.scoring.data());
  }
}
BENCHMARK(BM_GcnForwardBackward);

static void BM_LightGcnPropagate(benchmark::State& state) {
  Rng rng = make_stream({2});
  const auto table = EmbeddingTable::normal(1000, 1000, 32, 0.1, rng);
  for (auto _ : state) benchmark::DoNotOptimize(lightgcn_propagate(graph(), table, 3));
}
BENCHMARK(BM_LightGcnPropagate);

static void BM_EvaluateLgcf(benchmark::State& state) {
  const auto split = normal_split(graph(), 0.98, 3);
  const auto tg = training_graph(split);
  Model model;
  model.kind = ModelKind::Lgcf;
  Rng init = make_stream({3});
  model.gnn = GnnParameters::init(model.config.gnn, init);
  const ModelScorer scorer(model, tg);
  EvalProtocol protocol;
  protocol.threads = static_cast<unsigned>(state.range(0));
  const std::vector<Edge> targets(split.test.begin(), split.test.begin() + 20);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_pairs(scorer, split, targets, protocol));
}
BENCHMARK(BM_EvaluateLgcf)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
