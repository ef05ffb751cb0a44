#include "gparse/synthetic.h"

#include <array>
#include <string>

namespace gparse {

namespace {

constexpr std::array kDet = {"the", "a"};
constexpr std::array kNoun = {"dog", "cat", "man", "park", "telescope", "house", "idea"};
constexpr std::array kPronoun = {"he", "she"};
constexpr std::array kTransitive = {"saw", "liked"};
constexpr std::array kSaying = {"said", "thought"};
constexpr std::array kImperative = {"look", "go", "choose"};
constexpr std::array kLocative = {"in", "with", "near"};
constexpr std::array kAdj = {"big", "old"};
constexpr std::array kAdv = {"quickly", "often", "there"};

class Grammar {
 public:
  explicit Grammar(Rng& rng) : rng_(rng) {}

  ParseTree sentence() {
    if (chance(0.3)) {
      ParseTree vp = imperative_vp();
      // Without a final period the clause is a bare S over VP.
      if (chance(0.5)) return make_node("S", {std::move(vp)});
      return make_node("S", {std::move(vp), leaf(".", ".")});
    }
    return make_node("S", {noun_phrase(0), verb_phrase(0), leaf(".", ".")});
  }

 private:
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  template <size_t N>
  std::string pick(const std::array<const char*, N>& words) {
    return words[std::uniform_int_distribution<size_t>(0, N - 1)(rng_)];
  }

  static ParseTree leaf(std::string pos, std::string word) {
    return make_preterminal(std::move(pos), std::move(word));
  }

  ParseTree adjective_phrase() {
    if (chance(0.3)) return make_node("ADJP", {leaf("JJ", pick(kAdj)), leaf("CC", "and"), leaf("JJ", pick(kAdj))});
    return make_node("ADJP", {leaf("JJ", pick(kAdj))});
  }

  ParseTree noun_phrase(int depth) {
    if (chance(0.15)) return make_node("NP", {leaf("PRP", pick(kPronoun))});
    std::vector<ParseTree> base;
    base.push_back(leaf("DT", pick(kDet)));
    if (chance(0.25)) base.push_back(adjective_phrase());
    base.push_back(leaf("NN", pick(kNoun)));
    ParseTree np = make_node("NP", std::move(base));
    if (depth < 2 && chance(0.25)) {
      ParseTree pp = make_node("PP", {leaf("IN", "of"), noun_phrase(depth + 1)});
      return make_node("NP", {std::move(np), std::move(pp)});
    }
    return np;
  }

  ParseTree locative_pp(int depth) {
    return make_node("PP", {leaf("IN", pick(kLocative)), noun_phrase(depth + 1)});
  }

  ParseTree adverb_phrase() { return make_node("ADVP", {leaf("RB", pick(kAdv))}); }

  ParseTree verb_phrase(int depth) {
    const double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    if (depth < 1 && r < 0.15) {
      return make_node("VP", {verb_phrase(depth + 1), leaf("CC", "and"), verb_phrase(depth + 1)});
    }
    if (depth < 2 && r < 0.3) {
      ParseTree clause = make_node("S", {noun_phrase(depth + 1), verb_phrase(depth + 1)});
      ParseTree sbar = make_node("SBAR", {leaf("IN", "that"), std::move(clause)});
      return make_node("VP", {leaf("VBD", pick(kSaying)), std::move(sbar)});
    }
    std::vector<ParseTree> kids;
    kids.push_back(leaf("VBD", pick(kTransitive)));
    kids.push_back(noun_phrase(depth + 1));
    if (chance(0.35)) {
      ParseTree pp = locative_pp(depth);
      // "with" is a coin flip between the object and the verb, so some
      // attachment error is irreducible.
      if (pp.children[0].word == "with" && chance(0.5)) {
        kids.back() = make_node("NP", {std::move(kids.back()), std::move(pp)});
      } else {
        kids.push_back(std::move(pp));
      }
    }
    if (chance(0.2)) kids.push_back(adverb_phrase());
    return make_node("VP", std::move(kids));
  }

  ParseTree imperative_vp() {
    std::vector<ParseTree> kids;
    kids.push_back(leaf("VB", pick(kImperative)));
    if (chance(0.4)) {
      kids.push_back(adverb_phrase());
    } else {
      kids.push_back(noun_phrase(1));
      if (chance(0.3)) kids.push_back(locative_pp(1));
    }
    return make_node("VP", std::move(kids));
  }

  Rng& rng_;
};

}  // namespace

ParseTree sample_synthetic_tree(Rng& rng) {
  ParseTree t = Grammar(rng).sentence();
  assign_spans(t);
  return t;
}

SyntheticCorpus make_synthetic_corpus(const SyntheticConfig& cfg) {
  Rng rng(cfg.seed);
  SyntheticCorpus c;
  for (int i = 0; i < cfg.train; ++i) c.train.push_back(sample_synthetic_tree(rng));
  for (int i = 0; i < cfg.dev; ++i) c.dev.push_back(sample_synthetic_tree(rng));
  return c;
}

}  // namespace gparse
