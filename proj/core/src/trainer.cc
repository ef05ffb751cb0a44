#include "gparse/trainer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "gparse/decoder.h"
#include "gparse/errors.h"
#include "gparse/evalb.h"
#include "gparse/parser.h"
#include "gparse/tagger.h"
#include "gparse/treebank.h"

namespace gparse {

std::vector<TrainingItem> make_training_items(std::span<const ParseTree> trees,
                                              const TagSet& tagset) {
  std::vector<TrainingItem> items;
  for (const ParseTree& t : trees) {
    const auto seqs = extract_gold_sequences(t);
    if (seqs.empty()) continue;
    auto indexed = std::make_shared<const IndexedTree>(IndexedTree::build(seqs.front().tree, tagset));
    for (const GoldSequence& s : seqs) {
      TrainingItem item;
      item.tree = indexed;
      item.inputs = s.inputs;
      for (const auto& name : s.targets) {
        const auto tag = tagset.bioes_index(name);
        if (!tag) throw Error(ErrorCode::kUnknownLabel, "target tag '" + name + "'");
        item.targets.push_back(*tag);
      }
      items.push_back(std::move(item));
    }
  }
  return items;
}

double compute_gradients(const TrainingItem& item, const ModelParams& params, Rng& rng,
                         ParamGrads& grads) {
  ReprArena arena(params, Mode::kTrain, &rng);
  std::vector<FeatureId> ids;
  std::vector<Vec> features;
  for (int node : item.inputs) {
    const FeatureId f = arena.add_feature(compose_subtree(arena, *item.tree, node));
    ids.push_back(f);
    const auto v = arena.feature(f);
    features.emplace_back(v.begin(), v.end());
  }
  TaggerCache cache;
  const TagLattice lattice(score_sequence(features, params, &cache));
  const NllGrad ng = sequence_nll_grad(lattice, item.targets);
  const std::vector<Vec> input_grads = tagger_backward(cache, ng.grad, params, grads);
  for (size_t i = 0; i < ids.size(); ++i) arena.add_feature_grad(ids[i], input_grads[i]);
  arena.backward(grads);
  return ng.nll;
}

double train_step(const TrainingItem& item, ModelParams& params, double base_lr, Rng& rng,
                  ParamGrads& grads) {
  grads.clear();
  const double nll = compute_gradients(item, params, rng, grads);
  apply_gradients(params, grads, base_lr);
  return nll;
}

double corpus_f1(std::span<const ParseTree> trees, const ModelParams& params, const TagSet& tagset) {
  std::vector<ParseTree> gold;
  std::vector<ParseTree> pred;
  gold.reserve(trees.size());
  pred.reserve(trees.size());
  ModelScorer scorer(params, tagset);
  const auto root = tagset.root_label();
  for (const ParseTree& t : trees) {
    const Sentence s{t.words(), t.pos_tags()};
    gold.push_back(expand_merged_labels(t));
    try {
      pred.push_back(parse(s, scorer, tagset));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUnknownPosTag) throw;
      std::vector<ParseTree> leaves;
      for (size_t i = 0; i < s.words.size(); ++i) leaves.push_back(make_preterminal(s.pos[i], s.words[i]));
      pred.push_back(make_node(root, std::move(leaves)));
    }
  }
  return 100.0 * evalb_f1(gold, pred).f1();
}

TrainResult train(std::span<const ParseTree> train_trees, std::span<const ParseTree> dev_trees,
                  const TagSet& tagset, const TrainConfig& cfg, const EpochCallback& on_epoch,
                  const std::optional<Tensor>& word_init) {
  std::vector<TrainingItem> items = make_training_items(train_trees, tagset);
  if (items.empty()) throw Error(ErrorCode::kEmptyTrainingSet, "no gold sequences to train on");

  Rng rng(cfg.seed);
  ModelParams params = ModelParams::create(cfg.dims, tagset, cfg.p_drop, rng);
  if (word_init) {
    if (!word_init->same_shape(params.words)) {
      throw Error(ErrorCode::kShapeMismatch, "initial word table has the wrong shape");
    }
    params.words = *word_init;
  }

  TrainResult result;
  EpochRecord first{0, std::numeric_limits<double>::quiet_NaN(), corpus_f1(dev_trees, params, tagset)};
  result.history.push_back(first);
  result.best = params;
  double best_f1 = first.dev_f1;
  if (on_epoch) on_epoch(first, params, true);

  ParamGrads grads(params);
  int stale = 0;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(items.begin(), items.end(), rng);
    double total = 0.0;
    for (const TrainingItem& item : items) total += train_step(item, params, cfg.base_lr, rng, grads);
    EpochRecord rec{epoch, total / double(items.size()), corpus_f1(dev_trees, params, tagset)};
    result.history.push_back(rec);
    const bool improved = rec.dev_f1 > best_f1;
    if (improved) {
      best_f1 = rec.dev_f1;
      result.best = params;
      result.best_epoch = epoch;
      stale = 0;
    } else {
      ++stale;
    }
    if (on_epoch) on_epoch(rec, params, improved);
    if (stale >= cfg.patience) break;
  }
  return result;
}

void write_history_csv(std::ostream& out, std::span<const EpochRecord> history) {
  out << "epoch,train_nll,dev_f1\n";
  char buf[96];
  for (const auto& r : history) {
    if (std::isnan(r.train_nll)) {
      std::snprintf(buf, sizeof buf, "%d,,%.4f\n", r.epoch, r.dev_f1);
    } else {
      std::snprintf(buf, sizeof buf, "%d,%.6f,%.4f\n", r.epoch, r.train_nll, r.dev_f1);
    }
    out << buf;
  }
}

}  // namespace gparse
