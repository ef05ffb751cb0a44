#include "gparse/tagger.h"

#include <algorithm>
#include <string>

#include "gparse/errors.h"

namespace gparse {

Vec window_input(std::span<const Vec> features, int center, const ModelParams& params) {
  const int k = params.dims.window;
  const int half = (k - 1) / 2;
  const size_t f = params.dims.feature();
  const int n = static_cast<int>(features.size());
  Vec u(static_cast<size_t>(k) * f);
  for (int s = 0; s < k; ++s) {
    const int j = center - half + s;
    const auto src = (j < 0 || j >= n) ? std::span<const double>(params.pad.col(0))
                                       : std::span<const double>(features[j]);
    std::copy(src.begin(), src.end(), u.begin() + s * f);
  }
  return u;
}

ScoreTable score_sequence(std::span<const Vec> features, const ModelParams& params,
                          TaggerCache* cache) {
  const size_t f = params.dims.feature();
  for (const auto& x : features) {
    if (x.size() != f) {
      throw Error(ErrorCode::kShapeMismatch,
                  "tagger input of " + std::to_string(x.size()) + " values, expected " + std::to_string(f));
    }
  }
  const int n = static_cast<int>(features.size());
  ScoreTable scores(n, params.num_bioes());
  if (cache) {
    cache->inputs.assign(features.begin(), features.end());
    cache->hidden.clear();
    cache->valid = true;
  }
  for (int i = 0; i < n; ++i) {
    const Vec u = window_input(features, i, params);
    Vec h = affine_tanh(params.hidden, u);
    const Vec s = affine(params.output, h);
    std::copy(s.begin(), s.end(), scores.row(i).begin());
    if (cache) cache->hidden.push_back(std::move(h));
  }
  return scores;
}

std::vector<Vec> tagger_backward(const TaggerCache& cache, const ScoreTable& grad_scores,
                                 const ModelParams& params, ParamGrads& grads) {
  if (!cache.valid) throw Error(ErrorCode::kMissingForwardCache, "tagger forward pass not cached");
  const int n = static_cast<int>(cache.inputs.size());
  if (grad_scores.rows() != n || grad_scores.cols() != params.num_bioes()) {
    throw Error(ErrorCode::kShapeMismatch, "score gradient shape");
  }
  const int k = params.dims.window;
  const int half = (k - 1) / 2;
  const size_t f = params.dims.feature();
  const size_t h_dim = params.dims.hidden;

  std::vector<Vec> input_grads(n, Vec(f, 0.0));
  Vec g_hidden(h_dim);
  Vec g_pre(h_dim);
  Vec g_u(static_cast<size_t>(k) * f);
  for (int i = 0; i < n; ++i) {
    const auto gs = grad_scores.row(i);
    if (std::all_of(gs.begin(), gs.end(), [](double v) { return v == 0.0; })) continue;
    const Vec& h = cache.hidden[i];
    std::fill(g_hidden.begin(), g_hidden.end(), 0.0);
    affine_backward(params.output, h, gs, &grads.output, g_hidden);
    tanh_backward(h, g_hidden, g_pre);
    const Vec u = window_input(cache.inputs, i, params);
    std::fill(g_u.begin(), g_u.end(), 0.0);
    affine_backward(params.hidden, u, g_pre, &grads.hidden, g_u);
    for (int s = 0; s < k; ++s) {
      const int j = i - half + s;
      auto dst = (j < 0 || j >= n) ? grads.pad.col(0) : std::span<double>(input_grads[j]);
      for (size_t q = 0; q < f; ++q) dst[q] += g_u[s * f + q];
    }
  }
  return input_grads;
}

}  // namespace gparse
