#pragma once

#include <span>
#include <vector>

#include "gparse/bioes.h"
#include "gparse/score_table.h"

namespace gparse {

// Per-position BIOES scores plus the validity graph. Transitions carry no
// score; they only restrict which tag may follow which.
class TagLattice {
 public:
  // Throws kShapeMismatch unless scores has 4L+1 columns for some L >= 0.
  explicit TagLattice(ScoreTable scores);

  int length() const { return scores_.rows(); }
  int num_tags() const { return scores_.cols(); }
  int num_labels() const { return (scores_.cols() - 1) / 4; }
  const ScoreTable& scores() const { return scores_; }

  static bool allowed_start(int t) { return bioes::can_start(t); }
  static bool allowed_end(int t) { return bioes::can_end(t); }
  static bool allowed_next(int prev, int next) { return bioes::can_follow(prev, next); }

 private:
  ScoreTable scores_;
};

struct ViterbiResult {
  std::vector<int> tags;
  double score = 0.0;
};

// Best valid path. Among equal-scoring predecessors the lowest tag index wins.
ViterbiResult viterbi(const TagLattice& lattice);

// log of the summed exp(path score) over valid paths only.
double log_partition(const TagLattice& lattice);

// Posterior probability of each tag at each position under the valid-path
// distribution.
ScoreTable marginals(const TagLattice& lattice);

// Sum of the scores along `tags`.
double path_score(const TagLattice& lattice, std::span<const int> tags);

struct NllGrad {
  double nll = 0.0;
  ScoreTable grad;  // marginals minus the gold one-hot
};

// Throws kInvalidGoldPath when `gold` is not a valid path of the lattice.
NllGrad sequence_nll_grad(const TagLattice& lattice, std::span<const int> gold);

bool constrain_path_validity(std::span<const int> tags);

}  // namespace gparse
