#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gparse/tree.h"

namespace gparse {

// Labeled bracket of an internal node; preterminals never produce one.
struct Bracket {
  std::string label;
  int start = 0;
  int end = 0;

  friend auto operator<=>(const Bracket&, const Bracket&) = default;
};

// Sorted multiset of the tree's brackets, root included.
std::vector<Bracket> brackets(const ParseTree& tree);

// Size of the multiset intersection of two sorted bracket lists.
long matched_brackets(std::span<const Bracket> gold, std::span<const Bracket> pred);

struct BracketCounts {
  long matched = 0;
  long gold = 0;
  long pred = 0;

  double precision() const { return pred == 0 ? 0.0 : double(matched) / double(pred); }
  double recall() const { return gold == 0 ? 0.0 : double(matched) / double(gold); }
  double f1() const;
};

struct LengthBucket {
  int length = 0;
  int sentences = 0;
  BracketCounts counts;
};

// Scores are fractions in [0, 1].
struct EvalbResult {
  BracketCounts total;
  std::vector<LengthBucket> by_length;  // ascending sentence length

  double precision() const { return total.precision(); }
  double recall() const { return total.recall(); }
  double f1() const { return total.f1(); }
};

// Corpus-level labeled bracket scores. Trees should already have merged
// labels expanded. Throws kLengthMismatch when the lists differ in size or a
// pair differs in token count.
EvalbResult evalb_f1(std::span<const ParseTree> gold, std::span<const ParseTree> pred);

struct EvalReport {
  EvalbResult full;
  EvalbResult short_sentences;  // sentences of at most max_length tokens
  int max_length = 40;
};

EvalReport evaluate(std::span<const ParseTree> gold, std::span<const ParseTree> pred,
                    int max_length = 40);

// Human-readable block with P/R/F1 (percent) for both subsets.
std::string format_report(const EvalReport& report);

// "length,count,f1" with f1 in percent, one row per distinct length.
void write_length_csv(std::ostream& out, const EvalbResult& result);

}  // namespace gparse
