#pragma once

#include <memory>
#include <span>
#include <vector>

#include "gparse/params.h"
#include "gparse/tensor.h"
#include "gparse/tree.h"

namespace gparse {

class TagSet;

enum class Mode { kTrain, kEval };

// Index of a node representation inside a ReprArena.
using Handle = int;
// Index of a (representation ‖ tag embedding) feature vector handed to the tagger.
using FeatureId = int;

// Per-sentence store of node representations.
//
// Leaves take the word lookup column, internal nodes the output of the
// arity-k composition network over their children's (repr ‖ tag embedding)
// pairs. Every lookup-table output goes through dropout: a fresh 0/1 mask in
// kTrain mode, the (1 − p) rescale in kEval mode. In kTrain mode the forward
// values are kept so gradients can be pushed back with backward().
class ReprArena {
 public:
  // `rng` is required in kTrain mode when params.p_drop > 0.
  ReprArena(const ModelParams& params, Mode mode, Rng* rng = nullptr);

  Handle add_leaf(int word, int tag_column);

  // Composes `children` under a node whose tag embedding column is
  // `tag_column`. Arity above max_arity first composes the leftmost
  // max_arity children into a temporary node carrying the same tag, then
  // composes (temporary, remaining...) again. Throws kEmptyChildList.
  Handle add_node(int tag_column, std::span<const Handle> children);

  // Feature vector for the tagger: node repr followed by its tag embedding.
  FeatureId add_feature(Handle h);
  std::span<const double> feature(FeatureId id) const { return features_.at(id).value; }

  const Vec& vec(Handle h) const { return nodes_.at(h).vec; }
  int tag(Handle h) const { return nodes_.at(h).tag; }
  bool is_leaf(Handle h) const { return nodes_.at(h).word >= 0; }
  const std::vector<Handle>& children(Handle h) const { return nodes_.at(h).children; }
  int arity(Handle h) const { return static_cast<int>(nodes_.at(h).children.size()); }
  int size() const { return static_cast<int>(nodes_.size()); }
  Mode mode() const { return mode_; }
  const ModelParams& params() const { return params_; }

  // Gradient entry points; both accumulate until backward().
  void add_feature_grad(FeatureId id, std::span<const double> grad);
  void add_vec_grad(Handle h, std::span<const double> grad);

  // Pushes all accumulated node gradients down to the composition matrices
  // and lookup tables, then clears them. Throws kMissingForwardCache in
  // kEval mode.
  void backward(ParamGrads& grads);

 private:
  struct Node {
    Vec vec;
    int tag = -1;
    int word = -1;
    Vec word_mult;
    std::vector<Handle> children;
    std::vector<Vec> child_tag_mult;
    Vec input;
    Vec grad;
  };
  struct Feature {
    Handle node;
    Vec value;
    Vec tag_mult;
    Vec grad;
  };

  Vec embed(const Tensor& table, int column, Vec& mult);
  Handle compose_direct(int tag_column, std::span<const Handle> children);

  const ModelParams& params_;
  Mode mode_;
  Rng* rng_;
  std::vector<Node> nodes_;
  std::vector<Feature> features_;
};

// Stateless composition of explicit inputs, with the same overflow rule.
struct ChildInput {
  std::span<const double> repr;
  std::span<const double> tag_embedding;
};
Vec compose(std::span<const ChildInput> children, std::span<const double> parent_tag_embedding,
            const ModelParams& params);

// A tree with every node resolved to a word index and a tag-table column.
struct IndexedTree {
  std::shared_ptr<const FlatTree> tree;
  std::vector<int> word;        // per node; -1 for internal nodes
  std::vector<int> tag_column;  // POS column for leaves, label column otherwise

  // Throws kUnknownLabel for a POS or parse label missing from `tagset`.
  static IndexedTree build(std::shared_ptr<const FlatTree> tree, const TagSet& tagset);
};

// Composes the subtree rooted at `node` bottom-up into `arena`.
Handle compose_subtree(ReprArena& arena, const IndexedTree& tree, int node);

// Convenience: index `tree` against `tagset` and compose its root.
Handle compose_tree(ReprArena& arena, const ParseTree& tree, const TagSet& tagset);

// Backward pass from a root gradient through everything composed in `arena`.
// Throws kMissingForwardCache if `root` is not in the arena.
void compose_backward(ReprArena& arena, Handle root, std::span<const double> grad_root,
                      ParamGrads& grads);

}  // namespace gparse
