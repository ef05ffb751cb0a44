#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "gparse/composer.h"
#include "gparse/params.h"
#include "gparse/tree.h"
#include "gparse/vocab.h"

namespace gparse {

struct TrainConfig {
  double base_lr = 0.15;
  double p_drop = 0.25;
  Dims dims;
  int merge_threshold = 30;
  int max_epochs = 30;
  int patience = 5;
  uint64_t seed = 1;
  Precision precision = Precision::kFloat64;
};

// One replay iteration of one gold tree, resolved against a tagset.
struct TrainingItem {
  std::shared_ptr<const IndexedTree> tree;
  std::vector<int> inputs;   // node ids of the live constituents
  std::vector<int> targets;  // BIOES indices
};

// Throws kUnknownLabel for labels missing from `tagset`.
std::vector<TrainingItem> make_training_items(std::span<const ParseTree> trees,
                                              const TagSet& tagset);

// Forward and backward pass for one item with fresh dropout masks;
// accumulates into `grads` and returns the negative log-likelihood.
double compute_gradients(const TrainingItem& item, const ModelParams& params, Rng& rng,
                         ParamGrads& grads);

// compute_gradients followed by one SGD step. Returns the pre-update nll.
double train_step(const TrainingItem& item, ModelParams& params, double base_lr, Rng& rng,
                  ParamGrads& grads);

struct EpochRecord {
  int epoch = 0;
  double train_nll = 0.0;  // mean per item; NaN for the epoch-0 evaluation
  double dev_f1 = 0.0;     // percent
};

struct TrainResult {
  ModelParams best;
  std::vector<EpochRecord> history;
  int best_epoch = 0;
};

// Called after every epoch, with `improved` set when `params` is the new best.
using EpochCallback =
    std::function<void(const EpochRecord& record, const ModelParams& params, bool improved)>;

// Labeled-bracket F1 (percent) of greedy parses of `trees` against the
// trees themselves after label expansion. Sentences with a POS tag unknown
// to the tagset are scored as a flat root over their leaves.
double corpus_f1(std::span<const ParseTree> trees, const ModelParams& params, const TagSet& tagset);

// SGD over shuffled training items until max_epochs or `patience` epochs
// without a dev F1 gain; returns the parameters with the best dev F1.
// `word_init`, when given, replaces the initial word table.
// Throws kEmptyTrainingSet.
TrainResult train(std::span<const ParseTree> train_trees, std::span<const ParseTree> dev_trees,
                  const TagSet& tagset, const TrainConfig& cfg, const EpochCallback& on_epoch = {},
                  const std::optional<Tensor>& word_init = std::nullopt);

// "epoch,train_nll,dev_f1" CSV.
void write_history_csv(std::ostream& out, std::span<const EpochRecord> history);

}  // namespace gparse
