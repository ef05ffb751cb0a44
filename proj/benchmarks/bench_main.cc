// Hot paths at treebank scale: 40 live constituents and 40 labels (161 tags).

#include <benchmark/benchmark.h>

#include "gparse/decoder.h"
#include "gparse/parser.h"
#include "gparse/synthetic.h"
#include "gparse/tagger.h"
#include "gparse/trainer.h"
#include "gparse/treebank.h"

using namespace gparse;

namespace {

ScoreTable random_table(int n, int cols, uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  ScoreTable s(n, cols);
  for (double& v : s.values()) v = u(rng);
  return s;
}

void BM_Viterbi(benchmark::State& state) {
  const TagLattice lat(random_table(int(state.range(0)), 161, 1));
  for (auto _ : state) benchmark::DoNotOptimize(viterbi(lat));
}
BENCHMARK(BM_Viterbi)->Arg(10)->Arg(40);

void BM_Marginals(benchmark::State& state) {
  const TagLattice lat(random_table(int(state.range(0)), 161, 2));
  for (auto _ : state) benchmark::DoNotOptimize(marginals(lat));
}
BENCHMARK(BM_Marginals)->Arg(10)->Arg(40);

void BM_ScoreSequence(benchmark::State& state) {
  const Dims dims{200, 20, 500, 7, 7};
  Rng rng(3);
  const ModelParams p = ModelParams::create(dims, 1000, 100, 161, 0.25, rng);
  std::vector<Vec> inputs(size_t(state.range(0)), Vec(dims.feature(), 0.1));
  for (auto _ : state) benchmark::DoNotOptimize(score_sequence(inputs, p));
}
BENCHMARK(BM_ScoreSequence)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_ParseSynthetic(benchmark::State& state) {
  const SyntheticCorpus c = make_synthetic_corpus({200, 50, 20141220});
  const LabelCounts counts = count_merged_labels(c.train);
  const auto train = preprocess_all(c.train, counts, kDefaultMergeThreshold);
  const auto dev = preprocess_all(c.dev, counts, kDefaultMergeThreshold);
  const TagSet ts = build_tagset(train);
  Rng rng(4);
  const ModelParams p = ModelParams::create({32, 8, 64, 7, 7}, ts, 0.25, rng);
  ModelScorer scorer(p, ts);
  for (auto _ : state) {
    for (const auto& t : dev) benchmark::DoNotOptimize(parse(Sentence{t.words(), t.pos_tags()}, scorer, ts));
  }
  state.SetItemsProcessed(state.iterations() * int64_t(dev.size()));
}
BENCHMARK(BM_ParseSynthetic)->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
  const SyntheticCorpus c = make_synthetic_corpus({200, 10, 20141220});
  const auto train = preprocess_all(c.train, count_merged_labels(c.train), kDefaultMergeThreshold);
  const TagSet ts = build_tagset(train);
  const auto items = make_training_items(train, ts);
  Rng rng(5);
  ModelParams p = ModelParams::create({32, 8, 64, 7, 7}, ts, 0.25, rng);
  ParamGrads grads(p);
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_step(items[i], p, 0.15, rng, grads));
    i = (i + 1) % items.size();
  }
}
BENCHMARK(BM_TrainStep);

}  // namespace

BENCHMARK_MAIN();
