#pragma once

#include <cstdint>
#include <vector>

#include "gparse/tensor.h"
#include "gparse/tree.h"

namespace gparse {

// Small probabilistic grammar used for end-to-end checks: labels S, NP, VP,
// PP, SBAR, ADVP, ADJP, a 30-word vocabulary, imperative clauses that form
// S-over-VP unary chains, and prepositional attachment mostly decided by the
// preposition: "of" attaches to the noun phrase, "in" and "near" to the verb,
// and "with" to either at random.
struct SyntheticConfig {
  int train = 2000;
  int dev = 200;
  uint64_t seed = 20141220;
};

struct SyntheticCorpus {
  std::vector<ParseTree> train;
  std::vector<ParseTree> dev;
};

// Raw trees with spans assigned; run them through preprocessing as usual.
ParseTree sample_synthetic_tree(Rng& rng);
SyntheticCorpus make_synthetic_corpus(const SyntheticConfig& cfg = {});

}  // namespace gparse
