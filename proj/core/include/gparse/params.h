#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gparse/tensor.h"

namespace gparse {

class TagSet;

// Network sizes. `window` must be odd and `max_arity` at least 2.
struct Dims {
  int word = 200;       // D
  int tag = 20;         // T
  int hidden = 500;     // H
  int window = 7;       // K
  int max_arity = 7;    // largest composition arity with its own matrix

  int feature() const { return word + tag; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

enum class Precision { kFloat64, kFloat32 };

// All trainable tensors.
struct ModelParams {
  Dims dims;
  double p_drop = 0.0;

  Tensor words;                // D x |words|
  Tensor tags;                 // T x (|POS| + |labels|)
  std::vector<Tensor> compose; // compose[k-1]: D x k(D+T), k = 1..max_arity
  Tensor hidden;               // H x K(D+T)
  Tensor output;               // |BIOES| x H
  Tensor pad;                  // (D+T) x 1

  // Matrices uniform in ±1/sqrt(fan_in); lookup tables and pad in
  // ±kLookupInitBound. Throws kShapeMismatch on invalid dims.
  static ModelParams create(const Dims& dims, int num_words, int num_tag_columns, int num_bioes,
                            double p_drop, Rng& rng);
  static ModelParams create(const Dims& dims, const TagSet& tagset, double p_drop, Rng& rng);

  int num_bioes() const { return static_cast<int>(output.rows()); }

  size_t compose_fan_in(int arity) const { return static_cast<size_t>(arity) * dims.feature(); }
  size_t hidden_fan_in() const { return static_cast<size_t>(dims.window) * dims.feature(); }
  size_t output_fan_in() const { return static_cast<size_t>(dims.hidden); }

  // Throws kTagsetMismatch when the table sizes disagree with `tagset`.
  void check_compatible(const TagSet& tagset) const;

  bool bit_equal(const ModelParams& o) const;

  // Magic, format version, precision flag, then named tensors
  // (name, rows, cols, little-endian values).
  std::string serialize(Precision precision = Precision::kFloat64) const;
  static ModelParams deserialize(const std::string& bytes);
  void save(const std::filesystem::path& path, Precision precision = Precision::kFloat64) const;
  static ModelParams load(const std::filesystem::path& path);
};

// Gradient accumulators. Lookup tables are sparse: only touched columns are
// stored, in index order.
struct ParamGrads {
  explicit ParamGrads(const ModelParams& params);

  Vec& word_column(int index);
  Vec& tag_column(int index);

  void clear();

  size_t word_dim = 0;
  size_t tag_dim = 0;
  std::map<int, Vec> words;
  std::map<int, Vec> tags;
  std::vector<Tensor> compose;
  std::vector<bool> compose_touched;
  Tensor hidden;
  Tensor output;
  Tensor pad;
};

// SGD step on every parameter with a gradient, each layer's rate divided by
// its fan-in (lookup tables and pad use fan-in 1).
void apply_gradients(ModelParams& params, const ParamGrads& grads, double base_lr);

}  // namespace gparse
