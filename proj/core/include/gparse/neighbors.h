#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gparse/params.h"
#include "gparse/tree.h"
#include "gparse/vocab.h"

namespace gparse {

struct PhraseVector {
  std::string phrase;
  Vec vec;
};

// Internal-node vectors of a corpus, stored at float precision.
struct NeighborDump {
  int dim = 0;
  std::vector<PhraseVector> entries;
};

// Eval-mode representation of every internal node of every tree, labelled
// with the node's words. Throws kUnknownLabel.
NeighborDump collect_phrase_vectors(std::span<const ParseTree> trees, const ModelParams& params,
                                    const TagSet& tagset);

// Eval-mode representation of the root of `tree`.
Vec phrase_vector(const ParseTree& tree, const ModelParams& params, const TagSet& tagset);

// Binary stream: magic "GPNB", u32 version, u32 dim, then per record u32
// phrase length, phrase bytes and dim little-endian float32 values.
void write_dump(std::ostream& out, const NeighborDump& dump);
NeighborDump read_dump(std::istream& in);
void write_dump(const std::filesystem::path& path, const NeighborDump& dump);
NeighborDump read_dump(const std::filesystem::path& path);

struct Neighbor {
  size_t index = 0;
  std::string phrase;
  double distance = 0.0;
};

// The k entries closest to `query` in Euclidean distance, ascending, ties by
// dump order. Entries at distance zero, or whose phrase equals
// `exclude_phrase` when that is non-empty, are skipped as self matches.
// Throws kEmptyCorpusDump, kDimensionMismatch.
std::vector<Neighbor> nearest_phrases(std::span<const double> query, const NeighborDump& dump,
                                      size_t k, const std::string& exclude_phrase = {});

}  // namespace gparse
