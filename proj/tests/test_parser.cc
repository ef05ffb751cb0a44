#include <functional>

#include "doctest.h"
#include "gparse/errors.h"
#include "gparse/parser.h"
#include "gparse/treebank.h"
#include "support/oracles.h"

using namespace gparse;

namespace {

// Plays back a fixed tag choice per call: every row gets +1 on the tag the
// callback picks for it.
class ScriptedScorer : public NodeScorer {
 public:
  ScriptedScorer(int num_tags, std::function<std::vector<int>(int call, int n)> pick)
      : num_tags_(num_tags), pick_(std::move(pick)) {}
  void begin(const Sentence&) override { calls_ = 0; }
  ScoreTable score(std::span<const int> live) override {
    ScoreTable s(int(live.size()), num_tags_);
    const auto tags = pick_(calls_++, int(live.size()));
    for (size_t i = 0; i < tags.size(); ++i) s.at(int(i), tags[i]) = 1.0;
    return s;
  }
  void add_node(int, int, std::span<const int>) override {}
  int calls() const { return calls_; }

 private:
  int num_tags_;
  std::function<std::vector<int>(int, int)> pick_;
  int calls_ = 0;
};

Sentence sentence_of(const ParseTree& t) { return {t.words(), t.pos_tags()}; }

}  // namespace

TEST_SUITE("greedy_parser") {
  TEST_CASE("look-around sentence follows the reference derivation") {
    const ParseTree gold = oracle::look_around_tree();
    const TagSet ts = build_tagset({gold});
    oracle::GoldScorer scorer(gold, ts);
    const ParseOutcome out = parse_detailed(sentence_of(gold), scorer, ts);
    CHECK(to_bracketed(out.tree) ==
          "(S (VP (VP (VB Look) (PRT (RP around))) (CC and) (VP (VB choose) (NP (PRP$ your) (JJ own) "
          "(NN ground)))) (. .))");
    CHECK_FALSE(out.stagnated);
    const auto seqs = extract_gold_sequences(gold);
    REQUIRE(out.tag_history.size() == seqs.size());
    for (size_t i = 0; i < seqs.size(); ++i) {
      std::vector<std::string> names;
      for (int t : out.tag_history[i]) names.push_back(ts.bioes_name(t));
      CHECK(names == seqs[i].targets);
    }
  }

  TEST_CASE("gold scores reproduce random trees") {
    const auto raw = oracle::random_trees(150, 77);
    const auto trees = preprocess_all(raw, count_merged_labels(raw), 1);
    const TagSet ts = build_tagset(trees);
    for (const ParseTree& t : trees) {
      oracle::GoldScorer scorer(t, ts);
      const ParseOutcome out = parse_detailed(sentence_of(t), scorer, ts);
      CHECK(out.merged == t);
      CHECK(out.tree == expand_merged_labels(t));
      CHECK(out.iterations <= 2 * t.num_tokens());
    }
  }

  TEST_CASE("single word") {
    const ParseTree gold = parse_tree("(NP (NN dog))");
    const TagSet ts = build_tagset({gold});
    oracle::GoldScorer scorer(gold, ts);
    CHECK(parse(sentence_of(gold), scorer, ts) == gold);

    // All-O on a single leaf still yields one node over it.
    ScriptedScorer all_o(ts.num_bioes(), [](int, int n) { return std::vector<int>(n, 0); });
    const ParseOutcome out = parse_detailed(sentence_of(gold), all_o, ts);
    CHECK(to_bracketed(out.tree) == "(NP (NN dog))");
    CHECK(out.iterations == 1);
  }

  TEST_CASE("all-O pass wraps everything under the root label") {
    const TagSet ts = build_tagset({parse_tree("(S (NP (DT a) (NN b)) (VP (VB c)))")});
    ScriptedScorer all_o(ts.num_bioes(), [](int, int n) { return std::vector<int>(n, 0); });
    const Sentence s{{"a", "b", "c"}, {"DT", "NN", "VB"}};
    const ParseOutcome out = parse_detailed(s, all_o, ts);
    CHECK(out.stagnated);
    CHECK(to_bracketed(out.tree) == "(S (DT a) (NN b) (VB c))");
  }

  TEST_CASE("non-reducing passes terminate") {
    const TagSet ts = build_tagset({parse_tree("(S (NP (DT a) (NN b)) (VP (VB c)))")});
    const int np = *ts.label_index("NP");
    const int vp = *ts.label_index("VP");
    // Alternate S-NP and S-VP over every constituent: never reduces, and
    // suppression never applies because the label changes each pass.
    ScriptedScorer unary(ts.num_bioes(), [&](int call, int n) {
      return std::vector<int>(n, 1 + 4 * (call % 2 ? vp : np) + 3);
    });
    const Sentence s{{"a", "b", "c"}, {"DT", "NN", "VB"}};
    const ParseOutcome out = parse_detailed(s, unary, ts);
    CHECK(out.stagnated);
    CHECK(out.iterations == 2);
    CHECK(to_bracketed(out.tree) ==
          "(S (VP (NP (DT a))) (VP (NP (NN b))) (VP (NP (VB c))))");
  }

  TEST_CASE("a node is not given its own label twice in a row") {
    const TagSet ts = build_tagset({parse_tree("(S (NP (DT a) (NN b)) (VP (VB c)))")});
    const int np = *ts.label_index("NP");
    const int s_label = *ts.label_index("S");
    ScriptedScorer scorer(ts.num_bioes(), [&](int call, int n) {
      if (call == 0) return std::vector<int>{1 + 4 * np, 1 + 4 * np + 2, 0};
      if (call == 1) return std::vector<int>{1 + 4 * np + 3, 0};  // S-NP over the NP: ignored
      return std::vector<int>{1 + 4 * s_label, 1 + 4 * s_label + 2};
    });
    const Sentence s{{"a", "b", "c"}, {"DT", "NN", "VB"}};
    const ParseOutcome out = parse_detailed(s, scorer, ts);
    // Without suppression the third pass would build (S (NP (NP a b)) c).
    CHECK(to_bracketed(out.tree) == "(S (NP (DT a) (NN b)) (VB c))");
    CHECK(out.stagnated);
    CHECK(scorer.calls() == 2);
  }

  TEST_CASE("model parsing invariants") {
    const auto raw = oracle::random_trees(30, 8);
    const auto trees = preprocess_all(raw, count_merged_labels(raw), 1);
    const TagSet ts = build_tagset(trees);
    Rng rng(3);
    const ModelParams params = ModelParams::create({6, 3, 8, 3, 3}, ts, 0.25, rng);
    for (const ParseTree& t : trees) {
      const Sentence s = sentence_of(t);
      ModelScorer scorer(params, ts);
      const ParseOutcome out = parse_detailed(s, scorer, ts);
      CHECK(out.tree.words() == s.words);
      CHECK(out.tree.pos_tags() == s.pos);
      CHECK(out.tree.span == Span{0, t.num_tokens() - 1});
      CHECK(out.iterations <= 2 * t.num_tokens());
      CHECK(parse(s, params, ts) == out.tree);
    }
  }

  TEST_CASE("input errors") {
    const TagSet ts = build_tagset({parse_tree("(NP (NN dog))")});
    Rng rng(1);
    const ModelParams params = ModelParams::create({3, 2, 3, 3, 3}, ts, 0.0, rng);
    try {
      parse({{"dog"}, {"VB"}}, params, ts);
      FAIL("expected UnknownPosTag");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kUnknownPosTag);
    }
    CHECK_THROWS_AS(parse({{"dog", "cat"}, {"NN"}}, params, ts), Error);

    Derivation d;
    d.sentence = {{"a", "b"}, {"NN", "NN"}};
    d.nodes = {{-1, {}, {0, 0}}, {-1, {}, {1, 1}}, {0, {0}, {0, 0}}};
    d.root = 2;
    try {
      assemble_tree(d, ts);
      FAIL("expected IncompleteCoverage");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kIncompleteCoverage);
    }
  }

  TEST_CASE("tagged input lines") {
    const Sentence s = parse_tagged_line("Look/VB around/RP 1/2/CD ./.");
    CHECK(s.words == std::vector<std::string>{"Look", "around", "1/2", "."});
    CHECK(s.pos == std::vector<std::string>{"VB", "RP", "CD", "."});
    CHECK(parse_tagged_line("   ").words.empty());
    CHECK_THROWS_AS(parse_tagged_line("word"), Error);
  }
}
