#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gparse/tensor.h"
#include "gparse/tree.h"

namespace gparse {

std::string lowercase(std::string_view s);

// Word, POS and parse-label dictionaries plus the derived BIOES alphabet.
//
// The tag lookup table is shared by POS tags and parse labels: POS tag p
// occupies column p, parse label l occupies column num_pos() + l.
class TagSet {
 public:
  static constexpr int kUnknownWord = 0;
  static constexpr int kPaddingWord = 1;
  static constexpr std::string_view kUnknownToken = "*UNKNOWN*";
  static constexpr std::string_view kPaddingToken = "*PADDING*";

  TagSet();

  int num_words() const { return static_cast<int>(words_.size()); }
  int num_pos() const { return static_cast<int>(pos_.size()); }
  int num_labels() const { return static_cast<int>(labels_.size()); }
  int num_bioes() const { return 4 * num_labels() + 1; }
  int num_tag_columns() const { return num_pos() + num_labels(); }

  // Lowercases, then falls back to kUnknownWord.
  int word_index(std::string_view word) const;
  std::optional<int> pos_index(std::string_view pos) const;
  std::optional<int> label_index(std::string_view label) const;

  int pos_column(int pos) const { return pos; }
  int label_column(int label) const { return num_pos() + label; }

  const std::string& word(int i) const { return words_.at(i); }
  const std::string& pos(int i) const { return pos_.at(i); }
  const std::string& label(int i) const { return labels_.at(i); }

  std::string bioes_name(int tag) const;
  std::optional<int> bioes_index(std::string_view name) const;

  // Most frequent root label in the training trees; labels the synthetic
  // root the parser builds when it stops early.
  const std::string& root_label() const { return root_label_; }

  // Sections [WORDS], [POS], [LABELS] with "token<TAB>index" lines, then a
  // [ROOT] section holding the root label.
  std::string serialize() const;
  static TagSet deserialize(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static TagSet load(const std::filesystem::path& path);

  friend bool operator==(const TagSet& a, const TagSet& b) {
    return a.words_ == b.words_ && a.pos_ == b.pos_ && a.labels_ == b.labels_ &&
           a.root_label_ == b.root_label_;
  }

 private:
  friend TagSet build_tagset(const std::vector<ParseTree>&, int);
  void reindex();

  std::vector<std::string> words_;
  std::vector<std::string> pos_;
  std::vector<std::string> labels_;
  std::string root_label_;
  std::unordered_map<std::string, int> word_ids_;
  std::unordered_map<std::string, int> pos_ids_;
  std::unordered_map<std::string, int> label_ids_;
};

// Dictionaries from preprocessed training trees. Entries are sorted, so the
// result depends only on the multiset of trees. Throws kEmptyCorpus.
TagSet build_tagset(const std::vector<ParseTree>& trees, int min_word_count = 1);

struct EmbeddingLoad {
  Tensor table;       // dim x num_words
  int matched = 0;    // columns copied from the file
  int defaulted = 0;  // columns left at the default initializer
  int skipped = 0;    // file lines whose word is not in the dictionary
};

// Reads "word v1 ... vD" lines. Throws kDimensionMismatch, kMalformedLine.
EmbeddingLoad load_pretrained_embeddings(const std::filesystem::path& path, const TagSet& tagset,
                                         size_t dim, Rng& rng);

}  // namespace gparse
