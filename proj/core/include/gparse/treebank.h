#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gparse/tree.h"

namespace gparse {

// ---------------------------------------------------------------------------
// Bracketed treebank I/O.
//
// One tree per balanced expression; expressions may span lines. Leaves are
// written "(POS word)". A top-level node with an empty label wrapping a
// single tree (the Penn Treebank "( (S ...) )" convention) is unwrapped.
// ---------------------------------------------------------------------------

std::vector<ParseTree> parse_trees(std::string_view text);
ParseTree parse_tree(std::string_view text);
std::vector<ParseTree> read_trees(const std::filesystem::path& path);

void write_trees(std::ostream& out, const std::vector<ParseTree>& trees);
void write_trees(const std::filesystem::path& path, const std::vector<ParseTree>& trees);

// ---------------------------------------------------------------------------
// Preprocessing.
// ---------------------------------------------------------------------------

inline constexpr char kMergeSeparator = '|';
inline constexpr int kDefaultMergeThreshold = 30;

// Counts of '|'-joined unary-chain labels, keyed by the joined label.
using LabelCounts = std::map<std::string, long>;

// Removes functional suffixes and trace subtrees and renames PRT to ADVP.
// Returns nullopt when nothing but traces remains.
std::optional<ParseTree> normalize(const ParseTree& tree);

// Collapses every unary chain of internal nodes into one node whose label
// joins the chain's labels with '|', outermost first. No frequency cut-off.
ParseTree merge_unary_chains(const ParseTree& tree);

// Chain-label statistics over (normalized, merged) training trees.
LabelCounts count_merged_labels(const std::vector<ParseTree>& raw_trees);

// normalize + merge_unary_chains, then any joined label seen fewer than
// `merge_threshold` times in `label_stats` keeps only its topmost label.
std::optional<ParseTree> preprocess(const ParseTree& tree, const LabelCounts& label_stats,
                                    int merge_threshold = kDefaultMergeThreshold);

// Preprocesses a whole split, dropping trees that were only traces.
std::vector<ParseTree> preprocess_all(const std::vector<ParseTree>& trees,
                                      const LabelCounts& label_stats,
                                      int merge_threshold = kDefaultMergeThreshold);

// Inverse of the merge: "A|B|C" over xs becomes (A (B (C xs))).
ParseTree expand_merged_labels(const ParseTree& tree);

// Sidecar listing kept joined labels: "label<TAB>count" per line, sorted.
void write_label_counts(const std::filesystem::path& path, const LabelCounts& counts,
                        int merge_threshold);
LabelCounts read_label_counts(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Gold sequence extraction.
// ---------------------------------------------------------------------------

// One iteration of the bottom-up greedy procedure replayed on a gold tree:
// the live constituents (node ids into `tree`) and their BIOES targets.
struct GoldSequence {
  std::shared_ptr<const FlatTree> tree;
  std::vector<int> inputs;
  std::vector<std::string> targets;
  int iteration = 0;
};

// One GoldSequence per iteration until the root is built. A tree whose root
// is a preterminal yields no sequences.
std::vector<GoldSequence> extract_gold_sequences(const ParseTree& tree);

// Rebuilds a tree from its leaves and the chunk decisions recorded in
// `sequences` (targets only). Throws kIncompleteCoverage if more than one
// constituent is left over.
ParseTree reassemble_from_sequences(const std::vector<std::string>& words,
                                    const std::vector<std::string>& pos,
                                    const std::vector<GoldSequence>& sequences);

}  // namespace gparse
