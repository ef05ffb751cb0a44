#pragma once

#include <span>
#include <vector>

#include "gparse/params.h"
#include "gparse/score_table.h"
#include "gparse/tensor.h"

namespace gparse {

// Forward values kept for tagger_backward.
struct TaggerCache {
  std::vector<Vec> inputs;
  std::vector<Vec> hidden;
  bool valid = false;
};

// Window input u_n: the K feature vectors centred on n, with the learned
// padding vector standing in for positions outside [0, N).
Vec window_input(std::span<const Vec> features, int center, const ModelParams& params);

// Scores every constituent with M2·tanh(M1·u_n). Each feature vector is a
// constituent repr followed by its tag embedding (D+T values).
// Throws kShapeMismatch.
ScoreTable score_sequence(std::span<const Vec> features, const ModelParams& params,
                          TaggerCache* cache = nullptr);

// Accumulates gradients into M1, M2 and pad and returns the gradient with
// respect to each input feature vector; overlapping windows sum.
// Throws kMissingForwardCache.
std::vector<Vec> tagger_backward(const TaggerCache& cache, const ScoreTable& grad_scores,
                                 const ModelParams& params, ParamGrads& grads);

}  // namespace gparse
