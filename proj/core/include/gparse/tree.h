#pragma once

#include <memory>
#include <string>
#include <vector>

namespace gparse {

// Inclusive token range.
struct Span {
  int start = 0;
  int end = 0;

  int length() const { return end - start + 1; }
  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

// Labeled ordered tree over a token sequence. Preterminals (POS nodes) are
// the leaves: they carry a word and have no children; their label is the POS.
struct ParseTree {
  std::string label;
  std::string word;
  std::vector<ParseTree> children;
  Span span;

  bool is_preterminal() const { return children.empty(); }

  int num_tokens() const { return span.length(); }
  std::vector<std::string> words() const;
  std::vector<std::string> pos_tags() const;

  friend bool operator==(const ParseTree&, const ParseTree&) = default;
};

ParseTree make_preterminal(std::string pos, std::string word);
ParseTree make_node(std::string label, std::vector<ParseTree> children);

// Recomputes spans left-to-right starting at `start`; returns one past the
// last token index.
int assign_spans(ParseTree& tree, int start = 0);

// Single-line bracketed form, e.g. "(S (NP (DT a) (NN dog)) (VP (VBZ barks)))".
std::string to_bracketed(const ParseTree& tree);

// Bracketed form with words only (no POS), used for phrase display.
std::string to_phrase_text(const ParseTree& tree);

// Index-addressed view of a ParseTree. Node 0 is always the root; children
// precede nothing in particular, but every node's children are stored in
// left-to-right order and leaves are listed in token order.
struct FlatNode {
  std::string label;
  std::string word;
  std::vector<int> children;
  int parent = -1;
  Span span;

  bool is_preterminal() const { return children.empty(); }
};

class FlatTree {
 public:
  FlatTree() = default;

  // Validates that children spans are contiguous and ordered.
  static FlatTree from_tree(const ParseTree& tree);

  const FlatNode& node(int id) const { return nodes_.at(id); }
  int size() const { return static_cast<int>(nodes_.size()); }
  int root() const { return 0; }
  const std::vector<int>& leaves() const { return leaves_; }

  ParseTree subtree(int id) const;

 private:
  int add(const ParseTree& tree, int parent);

  std::vector<FlatNode> nodes_;
  std::vector<int> leaves_;
};

}  // namespace gparse
