#include "gparse/bioes.h"

#include "gparse/errors.h"

namespace gparse {

namespace bioes {

bool is_valid(std::span<const int> tags) {
  if (tags.empty()) return true;
  if (!can_start(tags.front()) || !can_end(tags.back())) return false;
  for (size_t n = 1; n < tags.size(); ++n) {
    if (!can_follow(tags[n - 1], tags[n])) return false;
  }
  return true;
}

}  // namespace bioes

std::vector<Chunk> decode_chunks(std::span<const int> tags) {
  std::vector<Chunk> out;
  int open = -1;
  for (int n = 0; n < static_cast<int>(tags.size()); ++n) {
    const int t = tags[n];
    if (bioes::is_outside(t)) continue;
    switch (bioes::prefix(t)) {
      case Prefix::kSingle: out.push_back({n, n, bioes::label(t)}); break;
      case Prefix::kBegin: open = n; break;
      case Prefix::kInside: break;
      case Prefix::kEnd: out.push_back({open, n, bioes::label(t)}); break;
    }
  }
  return out;
}

TagParts split_tag(std::string_view tag) {
  if (tag == "O") return {'O', {}};
  if (tag.size() < 3 || tag[1] != '-') return {'?', std::string(tag)};
  const char p = tag[0];
  if (p != 'B' && p != 'I' && p != 'E' && p != 'S') return {'?', std::string(tag)};
  return {p, std::string(tag.substr(2))};
}

std::string join_tag(char prefix, std::string_view label) {
  if (prefix == 'O') return "O";
  std::string out(1, prefix);
  out += '-';
  out += label;
  return out;
}

bool is_valid_bioes(std::span<const std::string> tags) {
  std::string open;
  bool inside = false;
  for (const auto& s : tags) {
    const TagParts t = split_tag(s);
    if (t.prefix == '?') return false;
    if (inside) {
      if ((t.prefix != 'I' && t.prefix != 'E') || t.label != open) return false;
      if (t.prefix == 'E') inside = false;
    } else {
      if (t.prefix == 'I' || t.prefix == 'E') return false;
      if (t.prefix == 'B') {
        inside = true;
        open = t.label;
      }
    }
  }
  return !inside;
}

std::vector<LabeledChunk> decode_chunks(std::span<const std::string> tags) {
  if (!is_valid_bioes(tags)) {
    throw Error(ErrorCode::kInvalidGoldPath, "tag sequence violates BIOES constraints");
  }
  std::vector<LabeledChunk> out;
  int open = -1;
  for (int n = 0; n < static_cast<int>(tags.size()); ++n) {
    const TagParts t = split_tag(tags[n]);
    if (t.prefix == 'S') out.push_back({n, n, t.label});
    if (t.prefix == 'B') open = n;
    if (t.prefix == 'E') out.push_back({open, n, t.label});
  }
  return out;
}

}  // namespace gparse
