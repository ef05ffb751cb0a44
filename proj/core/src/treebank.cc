#include "gparse/treebank.h"

#include <cctype>
#include <fstream>
#include <sstream>

#include "gparse/bioes.h"
#include "gparse/errors.h"

namespace gparse {

namespace {

struct Token {
  enum Kind { kOpen, kClose, kAtom } kind;
  std::string_view text;
  int line;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '(') {
      out.push_back({Token::kOpen, text.substr(i, 1), line});
      ++i;
    } else if (c == ')') {
      out.push_back({Token::kClose, text.substr(i, 1), line});
      ++i;
    } else {
      size_t j = i;
      while (j < text.size() && text[j] != '(' && text[j] != ')' &&
             !std::isspace(static_cast<unsigned char>(text[j]))) {
        ++j;
      }
      out.push_back({Token::kAtom, text.substr(i, j - i), line});
      i = j;
    }
  }
  return out;
}

class TreeReader {
 public:
  explicit TreeReader(std::string_view text) : tokens_(tokenize(text)) {}

  std::vector<ParseTree> read_all() {
    std::vector<ParseTree> trees;
    while (pos_ < tokens_.size()) {
      ++record_;
      const Token& t = tokens_[pos_];
      if (t.kind != Token::kOpen) {
        fail(ErrorCode::kUnbalancedBrackets, t.line, "expected '(' to open a tree");
      }
      const int start_line = t.line;
      ParseTree tree = read_node();
      if (tree.label.empty()) {
        if (tree.children.size() != 1) {
          fail(ErrorCode::kEmptyLabel, start_line, "root node has an empty label");
        }
        ParseTree inner = std::move(tree.children.front());
        tree = std::move(inner);
      }
      assign_spans(tree);
      trees.push_back(std::move(tree));
    }
    return trees;
  }

 private:
  [[noreturn]] void fail(ErrorCode code, int line, const std::string& what) const {
    std::ostringstream msg;
    msg << "record " << record_ << " (line " << line << "): " << what;
    throw Error(code, msg.str());
  }

  const Token& next(int line) {
    if (pos_ >= tokens_.size()) fail(ErrorCode::kUnbalancedBrackets, line, "unexpected end of input");
    return tokens_[pos_++];
  }

  // Called with the cursor on '('. Empty labels are reported by the caller
  // for the root; anywhere else they are an error.
  ParseTree read_node(bool is_root = true) {
    const Token& open = next(0);
    ParseTree node;
    const Token& head = next(open.line);
    if (head.kind == Token::kAtom) {
      node.label = std::string(head.text);
    } else if (head.kind == Token::kOpen) {
      --pos_;
    } else {
      fail(ErrorCode::kEmptyLabel, head.line, "node with empty label");
    }
    if (node.label.empty() && !is_root) fail(ErrorCode::kEmptyLabel, head.line, "node with empty label");

    const Token& first = next(head.line);
    if (first.kind == Token::kAtom) {
      node.word = std::string(first.text);
      const Token& close = next(first.line);
      if (close.kind != Token::kClose) {
        fail(ErrorCode::kUnbalancedBrackets, close.line,
             "preterminal '" + node.label + "' must hold exactly one word");
      }
      if (node.label.empty()) fail(ErrorCode::kEmptyLabel, head.line, "preterminal with empty label");
      return node;
    }
    if (first.kind == Token::kClose) {
      fail(ErrorCode::kUnbalancedBrackets, first.line, "node '" + node.label + "' has no children");
    }
    --pos_;
    while (true) {
      if (pos_ >= tokens_.size()) {
        fail(ErrorCode::kUnbalancedBrackets, open.line, "missing ')'");
      }
      const Token& t = tokens_[pos_];
      if (t.kind == Token::kClose) {
        ++pos_;
        break;
      }
      if (t.kind == Token::kAtom) {
        fail(ErrorCode::kUnbalancedBrackets, t.line,
             "word '" + std::string(t.text) + "' mixed with subtrees");
      }
      node.children.push_back(read_node(false));
    }
    return node;
  }

  std::vector<Token> tokens_;
  size_t pos_ = 0;
  int record_ = 0;
};

std::string strip_functional(const std::string& label) {
  const size_t cut = label.find_first_of("-=|", 1);
  return cut == std::string::npos ? label : label.substr(0, cut);
}

std::optional<ParseTree> normalize_rec(const ParseTree& t) {
  if (t.is_preterminal()) {
    if (t.label == "-NONE-") return std::nullopt;
    return t;
  }
  ParseTree out;
  out.label = strip_functional(t.label);
  if (out.label == "PRT") out.label = "ADVP";
  for (const auto& c : t.children) {
    if (auto n = normalize_rec(c)) out.children.push_back(std::move(*n));
  }
  if (out.children.empty()) return std::nullopt;
  return out;
}

ParseTree merge_rec(const ParseTree& t) {
  if (t.is_preterminal()) return t;
  ParseTree out;
  out.label = t.label;
  out.span = t.span;
  for (const auto& c : t.children) out.children.push_back(merge_rec(c));
  if (out.children.size() == 1 && !out.children.front().is_preterminal()) {
    ParseTree child = std::move(out.children.front());
    out.label += kMergeSeparator;
    out.label += child.label;
    out.children = std::move(child.children);
  }
  return out;
}

void count_rec(const ParseTree& t, LabelCounts& counts) {
  if (t.is_preterminal()) return;
  if (t.label.find(kMergeSeparator) != std::string::npos) ++counts[t.label];
  for (const auto& c : t.children) count_rec(c, counts);
}

void apply_threshold(ParseTree& t, const LabelCounts& stats, int threshold) {
  if (t.is_preterminal()) return;
  const size_t sep = t.label.find(kMergeSeparator);
  if (sep != std::string::npos) {
    const auto it = stats.find(t.label);
    const long count = it == stats.end() ? 0 : it->second;
    if (count < threshold) t.label = t.label.substr(0, sep);
  }
  for (auto& c : t.children) apply_threshold(c, stats, threshold);
}

}  // namespace

std::vector<ParseTree> parse_trees(std::string_view text) {
  return TreeReader(text).read_all();
}

ParseTree parse_tree(std::string_view text) {
  auto trees = parse_trees(text);
  if (trees.size() != 1) {
    throw Error(ErrorCode::kBadFormat, "expected exactly one tree, found " + std::to_string(trees.size()));
  }
  return std::move(trees.front());
}

std::vector<ParseTree> read_trees(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trees(buf.str());
}

void write_trees(std::ostream& out, const std::vector<ParseTree>& trees) {
  for (const auto& t : trees) out << to_bracketed(t) << '\n';
}

void write_trees(const std::filesystem::path& path, const std::vector<ParseTree>& trees) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  write_trees(out, trees);
}

std::optional<ParseTree> normalize(const ParseTree& tree) {
  auto out = normalize_rec(tree);
  if (out) assign_spans(*out);
  return out;
}

ParseTree merge_unary_chains(const ParseTree& tree) {
  ParseTree out = merge_rec(tree);
  assign_spans(out);
  return out;
}

LabelCounts count_merged_labels(const std::vector<ParseTree>& raw_trees) {
  LabelCounts counts;
  for (const auto& raw : raw_trees) {
    if (auto t = normalize(raw)) count_rec(merge_unary_chains(*t), counts);
  }
  return counts;
}

std::optional<ParseTree> preprocess(const ParseTree& tree, const LabelCounts& label_stats,
                                    int merge_threshold) {
  auto t = normalize(tree);
  if (!t) return std::nullopt;
  ParseTree merged = merge_unary_chains(*t);
  apply_threshold(merged, label_stats, merge_threshold);
  return merged;
}

std::vector<ParseTree> preprocess_all(const std::vector<ParseTree>& trees,
                                      const LabelCounts& label_stats, int merge_threshold) {
  std::vector<ParseTree> out;
  out.reserve(trees.size());
  for (const auto& t : trees) {
    if (auto p = preprocess(t, label_stats, merge_threshold)) out.push_back(std::move(*p));
  }
  return out;
}

ParseTree expand_merged_labels(const ParseTree& tree) {
  if (tree.is_preterminal()) return tree;
  ParseTree inner;
  inner.span = tree.span;
  for (const auto& c : tree.children) inner.children.push_back(expand_merged_labels(c));

  std::vector<std::string> parts;
  size_t begin = 0;
  while (true) {
    const size_t sep = tree.label.find(kMergeSeparator, begin);
    parts.push_back(tree.label.substr(begin, sep - begin));
    if (sep == std::string::npos) break;
    begin = sep + 1;
  }
  inner.label = parts.back();
  for (auto it = parts.rbegin() + 1; it != parts.rend(); ++it) {
    ParseTree outer;
    outer.label = *it;
    outer.span = tree.span;
    outer.children.push_back(std::move(inner));
    inner = std::move(outer);
  }
  return inner;
}

void write_label_counts(const std::filesystem::path& path, const LabelCounts& counts,
                        int merge_threshold) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  for (const auto& [label, count] : counts) {
    if (count >= merge_threshold) out << label << '\t' << count << '\n';
  }
}

LabelCounts read_label_counts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  LabelCounts counts;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::kMalformedLine, path.string() + ":" + std::to_string(n));
    }
    try {
      counts[line.substr(0, tab)] = std::stol(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kMalformedLine, path.string() + ":" + std::to_string(n));
    }
  }
  return counts;
}

std::vector<GoldSequence> extract_gold_sequences(const ParseTree& tree) {
  auto flat = std::make_shared<const FlatTree>(FlatTree::from_tree(tree));
  std::vector<GoldSequence> out;
  std::vector<int> live = flat->leaves();

  for (int iteration = 0;; ++iteration) {
    if (live.size() == 1 && live.front() == flat->root()) break;

    GoldSequence seq;
    seq.tree = flat;
    seq.inputs = live;
    seq.iteration = iteration;
    seq.targets.assign(live.size(), "O");

    std::vector<int> next;
    bool merged_any = false;
    size_t i = 0;
    while (i < live.size()) {
      const int parent = flat->node(live[i]).parent;
      bool ready = false;
      if (parent >= 0) {
        const auto& kids = flat->node(parent).children;
        ready = kids.front() == live[i] && i + kids.size() <= live.size();
        for (size_t j = 0; ready && j < kids.size(); ++j) ready = kids[j] == live[i + j];
      }
      if (!ready) {
        next.push_back(live[i]);
        ++i;
        continue;
      }
      const auto& kids = flat->node(parent).children;
      const std::string& label = flat->node(parent).label;
      if (kids.size() == 1) {
        seq.targets[i] = join_tag('S', label);
      } else {
        seq.targets[i] = join_tag('B', label);
        for (size_t j = 1; j + 1 < kids.size(); ++j) seq.targets[i + j] = join_tag('I', label);
        seq.targets[i + kids.size() - 1] = join_tag('E', label);
      }
      next.push_back(parent);
      i += kids.size();
      merged_any = true;
    }
    if (!merged_any) {
      throw Error(ErrorCode::kReplayStuck,
                  "no node is ready at iteration " + std::to_string(iteration) + " of " +
                      to_bracketed(tree));
    }
    out.push_back(std::move(seq));
    live = std::move(next);
  }
  return out;
}

ParseTree reassemble_from_sequences(const std::vector<std::string>& words,
                                    const std::vector<std::string>& pos,
                                    const std::vector<GoldSequence>& sequences) {
  if (words.size() != pos.size()) {
    throw Error(ErrorCode::kLengthMismatch, "words and POS tags differ in length");
  }
  std::vector<ParseTree> live;
  for (size_t i = 0; i < words.size(); ++i) live.push_back(make_preterminal(pos[i], words[i]));

  for (const auto& seq : sequences) {
    if (seq.targets.size() != live.size()) {
      throw Error(ErrorCode::kLengthMismatch,
                  "sequence at iteration " + std::to_string(seq.iteration) + " has " +
                      std::to_string(seq.targets.size()) + " targets for " +
                      std::to_string(live.size()) + " constituents");
    }
    std::vector<ParseTree> next;
    int cursor = 0;
    for (const auto& chunk : decode_chunks(std::span<const std::string>(seq.targets))) {
      for (; cursor < chunk.begin; ++cursor) next.push_back(std::move(live[cursor]));
      ParseTree node;
      node.label = chunk.label;
      for (; cursor <= chunk.end; ++cursor) node.children.push_back(std::move(live[cursor]));
      next.push_back(std::move(node));
    }
    for (; cursor < static_cast<int>(live.size()); ++cursor) next.push_back(std::move(live[cursor]));
    live = std::move(next);
  }
  if (live.size() != 1) {
    throw Error(ErrorCode::kIncompleteCoverage,
                std::to_string(live.size()) + " constituents left after replay");
  }
  ParseTree root = std::move(live.front());
  assign_spans(root);
  return root;
}

}  // namespace gparse
