#include "gparse/ensemble.h"

#include <algorithm>

#include "gparse/errors.h"

namespace gparse {

VotingScorer::VotingScorer(std::span<const ModelParams* const> models,
                           std::span<const TagSet* const> tagsets) {
  if (models.empty()) throw Error(ErrorCode::kShapeMismatch, "voting needs at least one model");
  if (tagsets.size() != models.size()) {
    throw Error(ErrorCode::kTagsetMismatch, "one tagset per model is required");
  }
  for (size_t i = 0; i < models.size(); ++i) {
    if (!(*tagsets[i] == *tagsets[0])) {
      throw Error(ErrorCode::kTagsetMismatch, "model " + std::to_string(i + 1) +
                                                  " was trained with a different tagset");
    }
    members_.push_back(std::make_unique<ModelScorer>(*models[i], *tagsets[i]));
  }
}

void VotingScorer::begin(const Sentence& sentence) {
  for (auto& m : members_) m->begin(sentence);
}

ScoreTable VotingScorer::score(std::span<const int> live) {
  std::vector<ScoreTable> tables;
  tables.reserve(members_.size());
  for (auto& m : members_) tables.push_back(m->score(live));
  return average_scores(tables);
}

void VotingScorer::add_node(int id, int label, std::span<const int> children) {
  for (auto& m : members_) m->add_node(id, label, children);
}

ScoreTable average_scores(std::span<const ScoreTable> tables) {
  if (tables.empty()) return {};
  ScoreTable out(tables[0].rows(), tables[0].cols());
  for (const auto& t : tables) {
    if (t.rows() != out.rows() || t.cols() != out.cols()) {
      throw Error(ErrorCode::kShapeMismatch, "score tables differ in shape");
    }
  }
  std::vector<double> cell(tables.size());
  const double n = static_cast<double>(tables.size());
  for (size_t i = 0; i < out.values().size(); ++i) {
    for (size_t m = 0; m < tables.size(); ++m) cell[m] = tables[m].values()[i];
    std::sort(cell.begin(), cell.end());
    double sum = 0.0;
    for (double v : cell) sum += v;
    out.values()[i] = sum / n;
  }
  return out;
}

ParseTree vote_parse(const Sentence& sentence, std::span<const ModelParams* const> models,
                     std::span<const TagSet* const> tagsets) {
  VotingScorer scorer(models, tagsets);
  return parse(sentence, scorer, *tagsets[0]);
}

}  // namespace gparse
