#include "gparse/parser.h"

#include <sstream>

#include "gparse/bioes.h"
#include "gparse/decoder.h"
#include "gparse/errors.h"
#include "gparse/tagger.h"
#include "gparse/treebank.h"

namespace gparse {

ModelScorer::ModelScorer(const ModelParams& params, const TagSet& tagset)
    : params_(params), tagset_(tagset) {
  params.check_compatible(tagset);
}

void ModelScorer::begin(const Sentence& sentence) {
  arena_.emplace(params_, Mode::kEval);
  handles_.clear();
  features_.clear();
  for (size_t i = 0; i < sentence.words.size(); ++i) {
    const auto pos = tagset_.pos_index(sentence.pos[i]);
    if (!pos) throw Error(ErrorCode::kUnknownPosTag, sentence.pos[i]);
    add_handle(arena_->add_leaf(tagset_.word_index(sentence.words[i]), tagset_.pos_column(*pos)));
  }
}

void ModelScorer::add_handle(Handle h) {
  handles_.push_back(h);
  const FeatureId f = arena_->add_feature(h);
  const auto v = arena_->feature(f);
  features_.emplace_back(v.begin(), v.end());
}

ScoreTable ModelScorer::score(std::span<const int> live) {
  std::vector<Vec> inputs;
  inputs.reserve(live.size());
  for (int id : live) inputs.push_back(features_.at(id));
  return score_sequence(inputs, params_);
}

void ModelScorer::add_node(int id, int label, std::span<const int> children) {
  if (id != static_cast<int>(handles_.size())) {
    throw Error(ErrorCode::kIndexOutOfRange, "node ids must be allocated in order");
  }
  std::vector<Handle> kids;
  kids.reserve(children.size());
  for (int c : children) kids.push_back(handles_.at(c));
  add_handle(arena_->add_node(tagset_.label_column(label), kids));
}

namespace {

ParseTree build(const Derivation& d, const TagSet& tagset, int id) {
  const DerivedNode& n = d.nodes.at(id);
  if (n.label < 0) return make_preterminal(d.sentence.pos.at(id), d.sentence.words.at(id));
  std::vector<ParseTree> kids;
  kids.reserve(n.children.size());
  for (int c : n.children) kids.push_back(build(d, tagset, c));
  return make_node(tagset.label(n.label), std::move(kids));
}

}  // namespace

ParseTree assemble_tree(const Derivation& d, const TagSet& tagset) {
  const int n = static_cast<int>(d.sentence.words.size());
  if (d.root < 0 || d.root >= static_cast<int>(d.nodes.size()) ||
      d.nodes[d.root].span != Span{0, n - 1}) {
    throw Error(ErrorCode::kIncompleteCoverage, "derivation root does not span the sentence");
  }
  ParseTree t = build(d, tagset, d.root);
  assign_spans(t);
  return t;
}

ParseOutcome parse_detailed(const Sentence& sentence, NodeScorer& scorer, const TagSet& tagset) {
  const int n = static_cast<int>(sentence.words.size());
  if (n == 0 || sentence.pos.size() != sentence.words.size()) {
    throw Error(ErrorCode::kLengthMismatch, "sentence needs one POS tag per word and at least one word");
  }
  for (const auto& p : sentence.pos) {
    if (!tagset.pos_index(p)) throw Error(ErrorCode::kUnknownPosTag, p);
  }

  Derivation d;
  d.sentence = sentence;
  for (int i = 0; i < n; ++i) d.nodes.push_back({-1, {}, {i, i}});
  scorer.begin(sentence);

  ParseOutcome out;
  std::vector<int> live(n);
  for (int i = 0; i < n; ++i) live[i] = i;
  int non_reducing = 0;
  const int max_iterations = 2 * n;

  auto new_node = [&](int label, std::vector<int> children) {
    const int id = static_cast<int>(d.nodes.size());
    const Span span{d.nodes[children.front()].span.start, d.nodes[children.back()].span.end};
    scorer.add_node(id, label, children);
    d.nodes.push_back({label, std::move(children), span});
    return id;
  };

  while (!(live.size() == 1 && d.nodes[live[0]].label >= 0)) {
    if (out.iterations >= max_iterations) {
      out.stagnated = true;
      break;
    }
    const ViterbiResult path = viterbi(TagLattice(scorer.score(live)));
    out.tag_history.push_back(path.tags);
    ++out.iterations;

    std::vector<Chunk> chunks = decode_chunks(path.tags);
    std::erase_if(chunks, [&](const Chunk& c) {
      return c.begin == c.end && d.nodes[live[c.begin]].label == c.label;
    });
    if (chunks.empty()) {
      out.stagnated = true;
      break;
    }

    std::vector<int> next;
    size_t pos = 0;
    for (const Chunk& c : chunks) {
      while (static_cast<int>(pos) < c.begin) next.push_back(live[pos++]);
      std::vector<int> kids(live.begin() + c.begin, live.begin() + c.end + 1);
      next.push_back(new_node(c.label, std::move(kids)));
      pos = c.end + 1;
    }
    while (pos < live.size()) next.push_back(live[pos++]);

    const bool reduced = next.size() < live.size();
    live = std::move(next);
    non_reducing = reduced ? 0 : non_reducing + 1;
    if (non_reducing >= 2) {
      out.stagnated = true;
      break;
    }
  }

  if (live.size() == 1 && d.nodes[live[0]].label >= 0) {
    d.root = live[0];
  } else {
    const auto root = tagset.label_index(tagset.root_label());
    if (!root) throw Error(ErrorCode::kUnknownLabel, "tagset has no root label");
    d.root = new_node(*root, live);
  }
  out.merged = assemble_tree(d, tagset);
  out.tree = expand_merged_labels(out.merged);
  return out;
}

ParseTree parse(const Sentence& sentence, NodeScorer& scorer, const TagSet& tagset) {
  return parse_detailed(sentence, scorer, tagset).tree;
}

ParseTree parse(const Sentence& sentence, const ModelParams& params, const TagSet& tagset) {
  ModelScorer scorer(params, tagset);
  return parse(sentence, scorer, tagset);
}

Sentence parse_tagged_line(std::string_view line) {
  Sentence s;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) {
    const size_t slash = tok.rfind('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == tok.size()) {
      throw Error(ErrorCode::kMalformedLine, "token without word/POS form: " + tok);
    }
    s.words.push_back(tok.substr(0, slash));
    s.pos.push_back(tok.substr(slash + 1));
  }
  return s;
}

}  // namespace gparse
