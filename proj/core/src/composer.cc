#include "gparse/composer.h"

#include <algorithm>

#include "gparse/errors.h"
#include "gparse/vocab.h"

namespace gparse {

namespace {

void add_into(Vec& acc, std::span<const double> g) {
  if (acc.empty()) acc.assign(g.size(), 0.0);
  for (size_t i = 0; i < g.size(); ++i) acc[i] += g[i];
}

void add_scaled_into(Vec& acc, std::span<const double> mult, std::span<const double> g) {
  for (size_t i = 0; i < g.size(); ++i) acc[i] += mult[i] * g[i];
}

}  // namespace

ReprArena::ReprArena(const ModelParams& params, Mode mode, Rng* rng)
    : params_(params), mode_(mode), rng_(rng) {
  if (mode == Mode::kTrain && params.p_drop > 0.0 && rng == nullptr) {
    throw Error(ErrorCode::kShapeMismatch, "training-mode arena with dropout needs an rng");
  }
}

Vec ReprArena::embed(const Tensor& table, int column, Vec& mult) {
  if (column < 0 || static_cast<size_t>(column) >= table.cols()) {
    throw Error(ErrorCode::kIndexOutOfRange, "lookup column " + std::to_string(column));
  }
  const auto col = table.col(column);
  if (mode_ == Mode::kTrain) {
    if (params_.p_drop > 0.0) {
      DropoutResult d = dropout_mask(col, params_.p_drop, *rng_);
      mult = std::move(d.mask);
      return std::move(d.out);
    }
    mult.assign(col.size(), 1.0);
    return Vec(col.begin(), col.end());
  }
  return dropout_rescale_eval(col, params_.p_drop);
}

Handle ReprArena::add_leaf(int word, int tag_column) {
  if (tag_column < 0 || static_cast<size_t>(tag_column) >= params_.tags.cols()) {
    throw Error(ErrorCode::kIndexOutOfRange, "tag column " + std::to_string(tag_column));
  }
  Node n;
  n.word = word;
  n.tag = tag_column;
  n.vec = embed(params_.words, word, n.word_mult);
  nodes_.push_back(std::move(n));
  return static_cast<Handle>(nodes_.size() - 1);
}

Handle ReprArena::add_node(int tag_column, std::span<const Handle> children) {
  if (children.empty()) throw Error(ErrorCode::kEmptyChildList, "composition over zero children");
  const size_t kmax = static_cast<size_t>(params_.dims.max_arity);
  if (children.size() <= kmax) return compose_direct(tag_column, children);

  std::vector<Handle> rest;
  rest.push_back(compose_direct(tag_column, children.first(kmax)));
  rest.insert(rest.end(), children.begin() + kmax, children.end());
  return add_node(tag_column, rest);
}

Handle ReprArena::compose_direct(int tag_column, std::span<const Handle> children) {
  if (tag_column < 0 || static_cast<size_t>(tag_column) >= params_.tags.cols()) {
    throw Error(ErrorCode::kIndexOutOfRange, "tag column " + std::to_string(tag_column));
  }
  const size_t d = params_.dims.word;
  const size_t f = params_.dims.feature();
  const size_t k = children.size();

  Node n;
  n.tag = tag_column;
  n.children.assign(children.begin(), children.end());
  n.input.resize(k * f);
  for (size_t i = 0; i < k; ++i) {
    const Node& child = nodes_.at(children[i]);
    std::copy(child.vec.begin(), child.vec.end(), n.input.begin() + i * f);
    Vec mult;
    const Vec emb = embed(params_.tags, child.tag, mult);
    std::copy(emb.begin(), emb.end(), n.input.begin() + i * f + d);
    if (mode_ == Mode::kTrain) n.child_tag_mult.push_back(std::move(mult));
  }
  n.vec = affine_tanh(params_.compose[k - 1], n.input);
  if (mode_ != Mode::kTrain) n.input.clear();
  nodes_.push_back(std::move(n));
  return static_cast<Handle>(nodes_.size() - 1);
}

FeatureId ReprArena::add_feature(Handle h) {
  const Node& node = nodes_.at(h);
  Feature f;
  f.node = h;
  f.value = node.vec;
  const Vec emb = embed(params_.tags, node.tag, f.tag_mult);
  f.value.insert(f.value.end(), emb.begin(), emb.end());
  if (mode_ != Mode::kTrain) f.tag_mult.clear();
  features_.push_back(std::move(f));
  return static_cast<FeatureId>(features_.size() - 1);
}

void ReprArena::add_feature_grad(FeatureId id, std::span<const double> grad) {
  Feature& f = features_.at(id);
  if (grad.size() != f.value.size()) throw Error(ErrorCode::kShapeMismatch, "feature gradient size");
  add_into(f.grad, grad);
}

void ReprArena::add_vec_grad(Handle h, std::span<const double> grad) {
  Node& n = nodes_.at(h);
  if (grad.size() != n.vec.size()) throw Error(ErrorCode::kShapeMismatch, "node gradient size");
  add_into(n.grad, grad);
}

void ReprArena::backward(ParamGrads& grads) {
  if (mode_ != Mode::kTrain) {
    throw Error(ErrorCode::kMissingForwardCache, "evaluation-mode arena keeps no forward cache");
  }
  const size_t d = params_.dims.word;
  const size_t f = params_.dims.feature();

  for (Feature& feat : features_) {
    if (feat.grad.empty()) continue;
    const std::span<const double> g(feat.grad);
    add_into(nodes_[feat.node].grad, g.first(d));
    add_scaled_into(grads.tag_column(nodes_[feat.node].tag), feat.tag_mult, g.subspan(d));
    feat.grad.clear();
  }

  Vec grad_pre;
  Vec grad_input;
  for (Handle h = static_cast<Handle>(nodes_.size()) - 1; h >= 0; --h) {
    Node& n = nodes_[h];
    if (n.grad.empty()) continue;
    if (n.word >= 0) {
      add_scaled_into(grads.word_column(n.word), n.word_mult, n.grad);
      n.grad.clear();
      continue;
    }
    const size_t k = n.children.size();
    grad_pre.assign(d, 0.0);
    tanh_backward(n.vec, n.grad, grad_pre);
    grad_input.assign(k * f, 0.0);
    affine_backward(params_.compose[k - 1], n.input, grad_pre, &grads.compose[k - 1], grad_input);
    grads.compose_touched[k - 1] = true;
    const std::span<const double> gi(grad_input);
    for (size_t i = 0; i < k; ++i) {
      Node& child = nodes_[n.children[i]];
      add_into(child.grad, gi.subspan(i * f, d));
      add_scaled_into(grads.tag_column(child.tag), n.child_tag_mult[i], gi.subspan(i * f + d, f - d));
    }
    n.grad.clear();
  }
}

Vec compose(std::span<const ChildInput> children, std::span<const double> parent_tag_embedding,
            const ModelParams& params) {
  if (children.empty()) throw Error(ErrorCode::kEmptyChildList, "composition over zero children");
  const size_t d = params.dims.word;
  const size_t t = params.dims.tag;
  const size_t kmax = static_cast<size_t>(params.dims.max_arity);
  auto direct = [&](std::span<const ChildInput> kids) {
    Vec z;
    z.reserve(kids.size() * (d + t));
    for (const auto& c : kids) {
      if (c.repr.size() != d || c.tag_embedding.size() != t) {
        throw Error(ErrorCode::kShapeMismatch, "child input has wrong dimensions");
      }
      z.insert(z.end(), c.repr.begin(), c.repr.end());
      z.insert(z.end(), c.tag_embedding.begin(), c.tag_embedding.end());
    }
    return affine_tanh(params.compose[kids.size() - 1], z);
  };
  if (children.size() <= kmax) return direct(children);

  const Vec head = direct(children.first(kmax));
  std::vector<ChildInput> rest{{head, parent_tag_embedding}};
  rest.insert(rest.end(), children.begin() + kmax, children.end());
  return compose(rest, parent_tag_embedding, params);
}

IndexedTree IndexedTree::build(std::shared_ptr<const FlatTree> tree, const TagSet& tagset) {
  IndexedTree out;
  out.word.assign(tree->size(), -1);
  out.tag_column.assign(tree->size(), -1);
  for (int id = 0; id < tree->size(); ++id) {
    const FlatNode& n = tree->node(id);
    if (n.is_preterminal()) {
      const auto pos = tagset.pos_index(n.label);
      if (!pos) throw Error(ErrorCode::kUnknownLabel, "POS tag '" + n.label + "'");
      out.word[id] = tagset.word_index(n.word);
      out.tag_column[id] = tagset.pos_column(*pos);
    } else {
      const auto label = tagset.label_index(n.label);
      if (!label) throw Error(ErrorCode::kUnknownLabel, "parse label '" + n.label + "'");
      out.tag_column[id] = tagset.label_column(*label);
    }
  }
  out.tree = std::move(tree);
  return out;
}

Handle compose_subtree(ReprArena& arena, const IndexedTree& tree, int node) {
  const FlatNode& n = tree.tree->node(node);
  if (n.is_preterminal()) return arena.add_leaf(tree.word[node], tree.tag_column[node]);
  std::vector<Handle> kids;
  kids.reserve(n.children.size());
  for (int c : n.children) kids.push_back(compose_subtree(arena, tree, c));
  return arena.add_node(tree.tag_column[node], kids);
}

Handle compose_tree(ReprArena& arena, const ParseTree& tree, const TagSet& tagset) {
  const IndexedTree indexed =
      IndexedTree::build(std::make_shared<const FlatTree>(FlatTree::from_tree(tree)), tagset);
  return compose_subtree(arena, indexed, indexed.tree->root());
}

void compose_backward(ReprArena& arena, Handle root, std::span<const double> grad_root,
                      ParamGrads& grads) {
  if (root < 0 || root >= arena.size()) {
    throw Error(ErrorCode::kMissingForwardCache, "handle " + std::to_string(root) + " not in arena");
  }
  arena.add_vec_grad(root, grad_root);
  arena.backward(grads);
}

}  // namespace gparse
