#include "gparse/vocab.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gparse/bioes.h"
#include "gparse/errors.h"

namespace gparse {

namespace {

void walk(const ParseTree& t, std::map<std::string, long>& words, std::set<std::string>& pos,
          std::set<std::string>& labels) {
  if (t.is_preterminal()) {
    ++words[lowercase(t.word)];
    pos.insert(t.label);
    return;
  }
  labels.insert(t.label);
  for (const auto& c : t.children) walk(c, words, pos, labels);
}

void index_of(const std::vector<std::string>& names, std::unordered_map<std::string, int>& ids) {
  ids.clear();
  for (size_t i = 0; i < names.size(); ++i) ids.emplace(names[i], static_cast<int>(i));
}

bool parse_double(std::string_view s, double& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

TagSet::TagSet() {
  words_ = {std::string(kUnknownToken), std::string(kPaddingToken)};
  reindex();
}

void TagSet::reindex() {
  index_of(words_, word_ids_);
  index_of(pos_, pos_ids_);
  index_of(labels_, label_ids_);
}

int TagSet::word_index(std::string_view word) const {
  const auto it = word_ids_.find(lowercase(word));
  return it == word_ids_.end() ? kUnknownWord : it->second;
}

std::optional<int> TagSet::pos_index(std::string_view pos) const {
  const auto it = pos_ids_.find(std::string(pos));
  if (it == pos_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> TagSet::label_index(std::string_view label) const {
  const auto it = label_ids_.find(std::string(label));
  if (it == label_ids_.end()) return std::nullopt;
  return it->second;
}

std::string TagSet::bioes_name(int tag) const {
  if (bioes::is_outside(tag)) return "O";
  static constexpr char kPrefix[] = {'B', 'I', 'E', 'S'};
  return join_tag(kPrefix[static_cast<int>(bioes::prefix(tag))], label(bioes::label(tag)));
}

std::optional<int> TagSet::bioes_index(std::string_view name) const {
  const TagParts parts = split_tag(name);
  if (parts.prefix == 'O') return bioes::kOutside;
  const auto l = label_index(parts.label);
  if (!l) return std::nullopt;
  switch (parts.prefix) {
    case 'B': return bioes::tag(Prefix::kBegin, *l);
    case 'I': return bioes::tag(Prefix::kInside, *l);
    case 'E': return bioes::tag(Prefix::kEnd, *l);
    case 'S': return bioes::tag(Prefix::kSingle, *l);
    default: return std::nullopt;
  }
}

std::string TagSet::serialize() const {
  std::ostringstream out;
  auto section = [&out](const char* name, const std::vector<std::string>& entries) {
    out << '[' << name << "]\n";
    for (size_t i = 0; i < entries.size(); ++i) out << entries[i] << '\t' << i << '\n';
  };
  section("WORDS", words_);
  section("POS", pos_);
  section("LABELS", labels_);
  out << "[ROOT]\n" << root_label_ << '\n';
  return out.str();
}

TagSet TagSet::deserialize(std::string_view text) {
  TagSet ts;
  ts.words_.clear();
  std::vector<std::string>* target = nullptr;
  bool in_root = false;
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    if (line == "[WORDS]") {
      target = &ts.words_;
      in_root = false;
    } else if (line == "[POS]") {
      target = &ts.pos_;
      in_root = false;
    } else if (line == "[LABELS]") {
      target = &ts.labels_;
      in_root = false;
    } else if (line == "[ROOT]") {
      target = nullptr;
      in_root = true;
    } else if (in_root) {
      ts.root_label_ = line;
    } else {
      const size_t tab = line.rfind('\t');
      int index = -1;
      if (!target || tab == std::string::npos) {
        throw Error(ErrorCode::kMalformedLine, "tagset line " + std::to_string(n));
      }
      const std::string_view num = std::string_view(line).substr(tab + 1);
      auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), index);
      if (ec != std::errc() || index != static_cast<int>(target->size())) {
        throw Error(ErrorCode::kMalformedLine,
                    "tagset line " + std::to_string(n) + ": indices must be dense and ordered");
      }
      target->push_back(line.substr(0, tab));
    }
  }
  if (ts.words_.size() < 2 || ts.words_[kUnknownWord] != kUnknownToken ||
      ts.words_[kPaddingWord] != kPaddingToken) {
    throw Error(ErrorCode::kBadFormat, "tagset is missing the reserved word entries");
  }
  ts.reindex();
  return ts;
}

void TagSet::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << serialize();
}

TagSet TagSet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

TagSet build_tagset(const std::vector<ParseTree>& trees, int min_word_count) {
  if (trees.empty()) throw Error(ErrorCode::kEmptyCorpus, "no training trees");
  std::map<std::string, long> words;
  std::set<std::string> pos;
  std::set<std::string> labels;
  std::map<std::string, long> roots;
  for (const auto& t : trees) {
    walk(t, words, pos, labels);
    if (!t.is_preterminal()) ++roots[t.label];
  }

  TagSet ts;
  for (const auto& [w, count] : words) {
    if (count >= min_word_count && w != TagSet::kUnknownToken && w != TagSet::kPaddingToken) {
      ts.words_.push_back(w);
    }
  }
  ts.pos_.assign(pos.begin(), pos.end());
  ts.labels_.assign(labels.begin(), labels.end());
  long best = 0;
  for (const auto& [label, count] : roots) {
    if (count > best) {
      best = count;
      ts.root_label_ = label;
    }
  }
  if (ts.root_label_.empty() && !ts.labels_.empty()) ts.root_label_ = ts.labels_.front();
  ts.reindex();
  return ts;
}

EmbeddingLoad load_pretrained_embeddings(const std::filesystem::path& path, const TagSet& tagset,
                                         size_t dim, Rng& rng) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());

  EmbeddingLoad r;
  r.table = Tensor(dim, tagset.num_words());
  init_uniform(r.table, kLookupInitBound, rng);
  std::vector<bool> seen(tagset.num_words(), false);

  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    std::vector<double> values;
    std::string tok;
    while (fields >> tok) {
      double v = 0.0;
      if (!parse_double(tok, v)) {
        throw Error(ErrorCode::kMalformedLine, path.string() + ":" + std::to_string(n));
      }
      values.push_back(v);
    }
    if (values.size() != dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "expected " + std::to_string(dim) + ", found " + std::to_string(values.size()) +
                      " at line " + std::to_string(n));
    }
    const int idx = tagset.word_index(word);
    if (idx == TagSet::kUnknownWord || seen[idx]) {
      ++r.skipped;
      continue;
    }
    seen[idx] = true;
    std::copy(values.begin(), values.end(), r.table.col(idx).begin());
    ++r.matched;
  }
  r.defaulted = tagset.num_words() - r.matched;
  return r;
}

}  // namespace gparse
