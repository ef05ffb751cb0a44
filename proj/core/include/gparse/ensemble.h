#pragma once

#include <memory>
#include <span>
#include <vector>

#include "gparse/parser.h"

namespace gparse {

// Averages the score tables of several models cell by cell. Each model keeps
// its own arena; the shared Viterbi path builds the same nodes in all of them.
// Each cell's values are summed in sorted order, so the result does not
// depend on model order.
class VotingScorer : public NodeScorer {
 public:
  // Throws kTagsetMismatch unless every tagset equals the first and every
  // model fits it, kShapeMismatch when no model is given.
  VotingScorer(std::span<const ModelParams* const> models, std::span<const TagSet* const> tagsets);

  void begin(const Sentence& sentence) override;
  ScoreTable score(std::span<const int> live) override;
  void add_node(int id, int label, std::span<const int> children) override;

 private:
  std::vector<std::unique_ptr<ModelScorer>> members_;
};

// Averages raw score tables in a value-sorted order per cell.
ScoreTable average_scores(std::span<const ScoreTable> tables);

ParseTree vote_parse(const Sentence& sentence, std::span<const ModelParams* const> models,
                     std::span<const TagSet* const> tagsets);

}  // namespace gparse
