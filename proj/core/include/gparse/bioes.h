#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gparse {

// BIOES output alphabet over L parse labels. Index 0 is O; label l owns the
// four indices 1+4l .. 4+4l in B, I, E, S order.
enum class Prefix { kBegin = 0, kInside = 1, kEnd = 2, kSingle = 3 };

namespace bioes {

inline constexpr int kOutside = 0;

constexpr int num_tags(int num_labels) { return 4 * num_labels + 1; }
constexpr int tag(Prefix p, int label) { return 1 + 4 * label + static_cast<int>(p); }
constexpr bool is_outside(int t) { return t == kOutside; }
constexpr Prefix prefix(int t) { return static_cast<Prefix>((t - 1) % 4); }
constexpr int label(int t) { return (t - 1) / 4; }

// O, S-x and B-x may open a sequence; O, S-x and E-x may close one.
constexpr bool can_start(int t) {
  return is_outside(t) || prefix(t) == Prefix::kBegin || prefix(t) == Prefix::kSingle;
}
constexpr bool can_end(int t) {
  return is_outside(t) || prefix(t) == Prefix::kEnd || prefix(t) == Prefix::kSingle;
}
// A tag that leaves a chunk open (B-x, I-x) must be followed by I-x or E-x;
// any other tag may be followed by any tag that can start a sequence.
constexpr bool can_follow(int prev, int next) {
  if (!is_outside(prev) &&
      (prefix(prev) == Prefix::kBegin || prefix(prev) == Prefix::kInside)) {
    return !is_outside(next) && label(next) == label(prev) &&
           (prefix(next) == Prefix::kInside || prefix(next) == Prefix::kEnd);
  }
  return can_start(next);
}

bool is_valid(std::span<const int> tags);

}  // namespace bioes

// A decoded chunk over positions [begin, end] of the input sequence.
struct Chunk {
  int begin = 0;
  int end = 0;
  int label = 0;

  friend bool operator==(const Chunk&, const Chunk&) = default;
};

// Chunks of a valid index sequence, left to right. O positions produce none.
std::vector<Chunk> decode_chunks(std::span<const int> tags);

// String-level helpers for tags written "B-NP", "S-PRT", "O".
struct TagParts {
  char prefix = 'O';
  std::string label;
};

TagParts split_tag(std::string_view tag);
std::string join_tag(char prefix, std::string_view label);
bool is_valid_bioes(std::span<const std::string> tags);

struct LabeledChunk {
  int begin = 0;
  int end = 0;
  std::string label;

  friend bool operator==(const LabeledChunk&, const LabeledChunk&) = default;
};

// Throws Error(kInvalidGoldPath) on an invalid sequence.
std::vector<LabeledChunk> decode_chunks(std::span<const std::string> tags);

}  // namespace gparse
