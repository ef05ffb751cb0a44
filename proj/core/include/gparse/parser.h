#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gparse/composer.h"
#include "gparse/params.h"
#include "gparse/score_table.h"
#include "gparse/tree.h"
#include "gparse/vocab.h"

namespace gparse {

struct Sentence {
  std::vector<std::string> words;
  std::vector<std::string> pos;
};

// Supplies BIOES scores for the live constituents of one sentence. Leaves
// are constituents 0..N-1; every node the parser creates gets the next id.
class NodeScorer {
 public:
  virtual ~NodeScorer() = default;
  virtual void begin(const Sentence& sentence) = 0;
  virtual ScoreTable score(std::span<const int> live) = 0;
  virtual void add_node(int id, int label, std::span<const int> children) = 0;
};

// Scores with one model in eval mode over a per-sentence arena.
class ModelScorer : public NodeScorer {
 public:
  ModelScorer(const ModelParams& params, const TagSet& tagset);

  void begin(const Sentence& sentence) override;
  ScoreTable score(std::span<const int> live) override;
  void add_node(int id, int label, std::span<const int> children) override;

  const ReprArena& arena() const { return *arena_; }
  Handle handle(int id) const { return handles_.at(id); }

 private:
  void add_handle(Handle h);

  const ModelParams& params_;
  const TagSet& tagset_;
  std::optional<ReprArena> arena_;
  std::vector<Handle> handles_;
  std::vector<Vec> features_;
};

// A node built during parsing; leaves have label -1 and no children.
struct DerivedNode {
  int label = -1;
  std::vector<int> children;
  Span span;
};

struct Derivation {
  Sentence sentence;
  std::vector<DerivedNode> nodes;
  int root = -1;
};

// Converts the ancestry of `d.root` into a tree carrying merged labels.
// Throws kIncompleteCoverage unless the root spans the whole sentence.
ParseTree assemble_tree(const Derivation& d, const TagSet& tagset);

struct ParseOutcome {
  ParseTree merged;  // labels as predicted, '|' chains intact
  ParseTree tree;    // merged labels expanded
  int iterations = 0;
  bool stagnated = false;
  std::vector<std::vector<int>> tag_history;  // Viterbi path per iteration
};

// Greedy bottom-up loop: score the live constituents, decode one valid BIOES
// path, turn each chunk into a node, repeat. Stops once a single internal
// node remains. If a pass creates nothing, or two passes in a row fail to
// shrink the sequence, everything left is wrapped under tagset.root_label().
// An S-A chunk over a constituent already labeled A is ignored.
// Throws kUnknownPosTag, kLengthMismatch.
ParseOutcome parse_detailed(const Sentence& sentence, NodeScorer& scorer, const TagSet& tagset);

ParseTree parse(const Sentence& sentence, NodeScorer& scorer, const TagSet& tagset);
ParseTree parse(const Sentence& sentence, const ModelParams& params, const TagSet& tagset);

// "word/POS word/POS ..." split at the last '/' of each token.
Sentence parse_tagged_line(std::string_view line);

}  // namespace gparse
