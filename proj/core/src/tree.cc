#include "gparse/tree.h"

#include "gparse/errors.h"

namespace gparse {

namespace {

void collect(const ParseTree& t, std::vector<std::string>& out, bool want_word) {
  if (t.is_preterminal()) {
    out.push_back(want_word ? t.word : t.label);
    return;
  }
  for (const auto& c : t.children) collect(c, out, want_word);
}

void bracket(const ParseTree& t, std::string& out) {
  out += '(';
  out += t.label;
  out += ' ';
  if (t.is_preterminal()) {
    out += t.word;
  } else {
    for (size_t i = 0; i < t.children.size(); ++i) {
      if (i) out += ' ';
      bracket(t.children[i], out);
    }
  }
  out += ')';
}

void phrase(const ParseTree& t, std::string& out) {
  if (t.is_preterminal()) {
    if (!out.empty()) out += ' ';
    out += t.word;
    return;
  }
  for (const auto& c : t.children) phrase(c, out);
}

}  // namespace

std::vector<std::string> ParseTree::words() const {
  std::vector<std::string> out;
  collect(*this, out, true);
  return out;
}

std::vector<std::string> ParseTree::pos_tags() const {
  std::vector<std::string> out;
  collect(*this, out, false);
  return out;
}

ParseTree make_preterminal(std::string pos, std::string word) {
  ParseTree t;
  t.label = std::move(pos);
  t.word = std::move(word);
  return t;
}

ParseTree make_node(std::string label, std::vector<ParseTree> children) {
  ParseTree t;
  t.label = std::move(label);
  t.children = std::move(children);
  assign_spans(t);
  return t;
}

int assign_spans(ParseTree& tree, int start) {
  if (tree.is_preterminal()) {
    tree.span = {start, start};
    return start + 1;
  }
  int next = start;
  for (auto& c : tree.children) next = assign_spans(c, next);
  tree.span = {start, next - 1};
  return next;
}

std::string to_bracketed(const ParseTree& tree) {
  std::string out;
  bracket(tree, out);
  return out;
}

std::string to_phrase_text(const ParseTree& tree) {
  std::string out;
  phrase(tree, out);
  return out;
}

FlatTree FlatTree::from_tree(const ParseTree& tree) {
  FlatTree flat;
  flat.add(tree, -1);
  return flat;
}

int FlatTree::add(const ParseTree& tree, int parent) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({tree.label, tree.word, {}, parent, tree.span});
  if (tree.is_preterminal()) {
    if (tree.span.start != tree.span.end) {
      throw Error(ErrorCode::kNonContiguousChildren,
                  "preterminal '" + tree.label + "' spans more than one token");
    }
    leaves_.push_back(id);
    return id;
  }
  int expected = tree.span.start;
  for (const auto& c : tree.children) {
    if (c.span.start != expected || c.span.end < c.span.start) {
      throw Error(ErrorCode::kNonContiguousChildren,
                  "children of '" + tree.label + "' are not contiguous");
    }
    expected = c.span.end + 1;
    const int child = add(c, id);
    nodes_[id].children.push_back(child);
  }
  if (expected != tree.span.end + 1) {
    throw Error(ErrorCode::kNonContiguousChildren,
                "children of '" + tree.label + "' do not cover its span");
  }
  return id;
}

ParseTree FlatTree::subtree(int id) const {
  const FlatNode& n = nodes_.at(id);
  ParseTree t;
  t.label = n.label;
  t.word = n.word;
  t.span = n.span;
  for (int c : n.children) t.children.push_back(subtree(c));
  return t;
}

}  // namespace gparse
