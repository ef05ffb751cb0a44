#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "gparse/errors.h"
#include "gparse/treebank.h"
#include "gparse/vocab.h"

using namespace gparse;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_SUITE("vocab") {
  TEST_CASE("labels NP and VP give nine output tags") {
    const TagSet ts = build_tagset({parse_tree("(S (NP (DT The) (NN dog)) (VP (VBZ barks)))")});
    CHECK(ts.num_labels() == 3);
    const TagSet two = build_tagset({parse_tree("(NP (NP (DT a) (NN b)) (VP (VB c)))")});
    CHECK(two.num_labels() == 2);
    CHECK(two.num_bioes() == 9);
    std::vector<std::string> names;
    for (int t = 0; t < two.num_bioes(); ++t) names.push_back(two.bioes_name(t));
    CHECK(names == std::vector<std::string>{"O", "B-NP", "I-NP", "E-NP", "S-NP", "B-VP", "I-VP",
                                            "E-VP", "S-VP"});
    for (int t = 0; t < two.num_bioes(); ++t) CHECK(two.bioes_index(two.bioes_name(t)) == t);
  }

  TEST_CASE("words are lowercased and rare words map to UNK") {
    const TagSet ts = build_tagset({parse_tree("(S (NP (DT The) (NN the)) (VP (VB run) (NN dog) (NN dog)))")}, 2);
    CHECK(ts.word_index("The") == ts.word_index("the"));
    CHECK(ts.word_index("the") != TagSet::kUnknownWord);
    CHECK(ts.word_index("run") == TagSet::kUnknownWord);
    CHECK(ts.word_index("never-seen") == TagSet::kUnknownWord);
    CHECK(TagSet::kUnknownWord != TagSet::kPaddingWord);
  }

  TEST_CASE("empty corpus is an error") {
    CHECK_THROWS_AS(build_tagset({}), Error);
  }

  TEST_CASE("serialization is deterministic and round-trips") {
    const std::vector<ParseTree> trees = {parse_tree("(S (NP (DT a) (NN dog)) (VP (VBZ barks)))"),
                                          parse_tree("(S|VP (VB go) (ADVP (RB home)))")};
    const TagSet a = build_tagset(trees);
    const TagSet b = build_tagset({trees[1], trees[0]});
    CHECK(a.serialize() == b.serialize());
    const TagSet back = TagSet::deserialize(a.serialize());
    CHECK(back == a);
    CHECK(back.root_label() == a.root_label());
    CHECK(a.serialize().find("[WORDS]\n*UNKNOWN*\t0\n*PADDING*\t1\n") == 0);
  }

  TEST_CASE("pretrained embeddings") {
    const TagSet ts = build_tagset({parse_tree("(S (NP (DT the) (NN dog)) (VP (VBZ barks)))")});
    Rng rng(1);
    const auto file = write_temp("gparse_emb.txt",
                                 "dog 0.5 -1 2\nThe 1 2 3\ncat 9 9 9\nzebra 1 1 1\ndog 7 7 7\n");
    const EmbeddingLoad load = load_pretrained_embeddings(file, ts, 3, rng);
    const auto dog = load.table.col(ts.word_index("dog"));
    CHECK(std::vector<double>(dog.begin(), dog.end()) == std::vector<double>{0.5, -1, 2});
    CHECK(load.table(2, ts.word_index("the")) == 3.0);
    CHECK(load.matched == 2);
    CHECK(load.skipped == 3);
    CHECK(load.defaulted == ts.num_words() - 2);

    const auto empty = write_temp("gparse_emb_empty.txt", "");
    const EmbeddingLoad none = load_pretrained_embeddings(empty, ts, 3, rng);
    CHECK(none.defaulted == ts.num_words());
    for (double v : none.table.values()) CHECK(std::abs(v) <= kLookupInitBound);

    const auto bad_dim = write_temp("gparse_emb_dim.txt", "dog 1 2\n");
    try {
      load_pretrained_embeddings(bad_dim, ts, 3, rng);
      FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kDimensionMismatch);
    }
    const auto bad_num = write_temp("gparse_emb_num.txt", "dog 1 x 3\n");
    try {
      load_pretrained_embeddings(bad_num, ts, 3, rng);
      FAIL("expected MalformedLine");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kMalformedLine);
    }
  }
}
