#include "gparse/neighbors.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>

#include "gparse/composer.h"
#include "gparse/errors.h"

namespace gparse {

namespace {

constexpr char kDumpMagic[4] = {'G', 'P', 'N', 'B'};
constexpr uint32_t kDumpVersion = 1;

template <typename T>
void put(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw Error(ErrorCode::kBadFormat, "truncated neighbor dump");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

Vec to_float_precision(std::span<const double> v) {
  Vec out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i]);
  return out;
}

}  // namespace

NeighborDump collect_phrase_vectors(std::span<const ParseTree> trees, const ModelParams& params,
                                    const TagSet& tagset) {
  NeighborDump dump;
  dump.dim = params.dims.word;
  for (const ParseTree& t : trees) {
    auto flat = std::make_shared<const FlatTree>(FlatTree::from_tree(t));
    const IndexedTree indexed = IndexedTree::build(flat, tagset);
    ReprArena arena(params, Mode::kEval);
    std::vector<Handle> handle(flat->size(), -1);
    // Children always have larger ids than their parent.
    for (int id = flat->size() - 1; id >= 0; --id) {
      const FlatNode& n = flat->node(id);
      if (n.is_preterminal()) {
        handle[id] = arena.add_leaf(indexed.word[id], indexed.tag_column[id]);
        continue;
      }
      std::vector<Handle> kids;
      for (int c : n.children) kids.push_back(handle[c]);
      handle[id] = arena.add_node(indexed.tag_column[id], kids);
    }
    for (int id = 0; id < flat->size(); ++id) {
      if (flat->node(id).is_preterminal()) continue;
      dump.entries.push_back({to_phrase_text(flat->subtree(id)), to_float_precision(arena.vec(handle[id]))});
    }
  }
  return dump;
}

Vec phrase_vector(const ParseTree& tree, const ModelParams& params, const TagSet& tagset) {
  ReprArena arena(params, Mode::kEval);
  return arena.vec(compose_tree(arena, tree, tagset));
}

void write_dump(std::ostream& out, const NeighborDump& dump) {
  out.write(kDumpMagic, sizeof(kDumpMagic));
  put<uint32_t>(out, kDumpVersion);
  put<uint32_t>(out, static_cast<uint32_t>(dump.dim));
  for (const auto& e : dump.entries) {
    if (static_cast<int>(e.vec.size()) != dump.dim) {
      throw Error(ErrorCode::kDimensionMismatch, "dump entry of the wrong dimension");
    }
    put<uint32_t>(out, static_cast<uint32_t>(e.phrase.size()));
    out.write(e.phrase.data(), static_cast<std::streamsize>(e.phrase.size()));
    for (double v : e.vec) put<float>(out, static_cast<float>(v));
  }
}

NeighborDump read_dump(std::istream& in) {
  char magic[sizeof(kDumpMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kDumpMagic, sizeof(magic)) != 0) {
    throw Error(ErrorCode::kBadFormat, "not a neighbor dump");
  }
  if (get<uint32_t>(in) != kDumpVersion) throw Error(ErrorCode::kBadFormat, "unsupported dump version");
  NeighborDump dump;
  dump.dim = static_cast<int>(get<uint32_t>(in));
  while (in.peek() != std::char_traits<char>::eof()) {
    PhraseVector e;
    e.phrase.resize(get<uint32_t>(in));
    if (!in.read(e.phrase.data(), static_cast<std::streamsize>(e.phrase.size()))) {
      throw Error(ErrorCode::kBadFormat, "truncated neighbor dump");
    }
    e.vec.resize(dump.dim);
    for (double& v : e.vec) v = get<float>(in);
    dump.entries.push_back(std::move(e));
  }
  return dump;
}

void write_dump(const std::filesystem::path& path, const NeighborDump& dump) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  write_dump(out, dump);
}

NeighborDump read_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_dump(in);
}

std::vector<Neighbor> nearest_phrases(std::span<const double> query, const NeighborDump& dump,
                                      size_t k, const std::string& exclude_phrase) {
  if (dump.entries.empty()) throw Error(ErrorCode::kEmptyCorpusDump, "no phrases to search");
  if (static_cast<int>(query.size()) != dump.dim) {
    throw Error(ErrorCode::kDimensionMismatch, "query has " + std::to_string(query.size()) +
                                                   " values, dump has " + std::to_string(dump.dim));
  }
  std::vector<Neighbor> all;
  all.reserve(dump.entries.size());
  for (size_t i = 0; i < dump.entries.size(); ++i) {
    const auto& e = dump.entries[i];
    if (!exclude_phrase.empty() && e.phrase == exclude_phrase) continue;
    double sq = 0.0;
    for (size_t j = 0; j < query.size(); ++j) {
      const double d = e.vec[j] - query[j];
      sq += d * d;
    }
    if (sq == 0.0) continue;
    all.push_back({i, e.phrase, std::sqrt(sq)});
  }
  const size_t n = std::min(k, all.size());
  auto before = [](const Neighbor& a, const Neighbor& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.index < b.index;
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(), before);
  all.resize(n);
  return all;
}

}  // namespace gparse
