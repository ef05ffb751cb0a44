#include "gparse/tensor.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "gparse/errors.h"

namespace gparse {

namespace {

std::string shape(size_t r, size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::bit_equal(const Tensor& o) const {
  return same_shape(o) &&
         (data_.empty() || std::memcmp(data_.data(), o.data_.data(), data_.size() * sizeof(double)) == 0);
}

Vec lookup(const Tensor& table, size_t index) {
  if (index >= table.cols()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "index " + std::to_string(index) + " in table with " + std::to_string(table.cols()) +
                    " entries");
  }
  const auto c = table.col(index);
  return Vec(c.begin(), c.end());
}

Vec affine(const Tensor& m, std::span<const double> z) {
  if (m.cols() != z.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "matrix " + shape(m.rows(), m.cols()) + " times vector of " + std::to_string(z.size()));
  }
  Vec y(m.rows(), 0.0);
  const size_t rows = m.rows();
  for (size_t c = 0; c < m.cols(); ++c) {
    const double zc = z[c];
    if (zc == 0.0) continue;
    const double* col = m.col(c).data();
    for (size_t r = 0; r < rows; ++r) y[r] += col[r] * zc;
  }
  return y;
}

Vec affine_tanh(const Tensor& m, std::span<const double> z) {
  Vec y = affine(m, z);
  for (double& v : y) v = std::tanh(v);
  return y;
}

void affine_backward(const Tensor& m, std::span<const double> z, std::span<const double> g,
                     Tensor* grad_m, std::span<double> grad_z) {
  if (m.cols() != z.size() || m.rows() != g.size() || grad_z.size() != z.size() ||
      (grad_m && !grad_m->same_shape(m))) {
    throw Error(ErrorCode::kShapeMismatch, "affine_backward on " + shape(m.rows(), m.cols()));
  }
  const size_t rows = m.rows();
  for (size_t c = 0; c < m.cols(); ++c) {
    const double* col = m.col(c).data();
    double acc = 0.0;
    for (size_t r = 0; r < rows; ++r) acc += col[r] * g[r];
    grad_z[c] += acc;
    if (grad_m && z[c] != 0.0) {
      double* gcol = grad_m->col(c).data();
      const double zc = z[c];
      for (size_t r = 0; r < rows; ++r) gcol[r] += g[r] * zc;
    }
  }
}

void tanh_backward(std::span<const double> out, std::span<const double> grad_out,
                   std::span<double> grad_in) {
  if (out.size() != grad_out.size() || out.size() != grad_in.size()) {
    throw Error(ErrorCode::kShapeMismatch, "tanh_backward");
  }
  for (size_t i = 0; i < out.size(); ++i) grad_in[i] = grad_out[i] * (1.0 - out[i] * out[i]);
}

DropoutResult dropout_mask(std::span<const double> v, double p_drop, Rng& rng) {
  DropoutResult r{Vec(v.begin(), v.end()), Vec(v.size(), 1.0)};
  if (p_drop <= 0.0) return r;
  std::bernoulli_distribution drop(p_drop);
  for (size_t i = 0; i < v.size(); ++i) {
    if (drop(rng)) {
      r.mask[i] = 0.0;
      r.out[i] = 0.0;
    }
  }
  return r;
}

Vec dropout_rescale_eval(std::span<const double> v, double p_drop) {
  Vec out(v.begin(), v.end());
  const double keep = 1.0 - p_drop;
  for (double& x : out) x *= keep;
  return out;
}

void sgd_update(std::span<double> param, std::span<const double> grad, double base_lr,
                size_t fan_in) {
  if (param.size() != grad.size()) {
    throw Error(ErrorCode::kShapeMismatch, "sgd_update on " + std::to_string(param.size()) + " vs " +
                                               std::to_string(grad.size()) + " values");
  }
  const double lr = base_lr / static_cast<double>(std::max<size_t>(fan_in, 1));
  for (size_t i = 0; i < param.size(); ++i) param[i] -= lr * grad[i];
}

void sgd_update(Tensor& param, const Tensor& grad, double base_lr, size_t fan_in) {
  if (!param.same_shape(grad)) {
    throw Error(ErrorCode::kShapeMismatch, "sgd_update " + shape(param.rows(), param.cols()) +
                                               " vs " + shape(grad.rows(), grad.cols()));
  }
  sgd_update(param.values(), grad.values(), base_lr, fan_in);
}

void init_uniform(Tensor& t, double bound, Rng& rng) {
  std::uniform_real_distribution<double> u(-bound, bound);
  for (double& v : t.values()) v = u(rng);
}

double grad_check(const std::function<double()>& f, std::span<double> params,
                  std::span<const double> analytic, double eps, double floor) {
  if (params.size() != analytic.size()) {
    throw Error(ErrorCode::kShapeMismatch, "grad_check: analytic gradient size differs");
  }
  double worst = 0.0;
  for (size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + eps;
    const double up = f();
    params[i] = saved - eps;
    const double down = f();
    params[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down) || !std::isfinite(analytic[i])) {
      throw Error(ErrorCode::kNonFiniteValue, "grad_check at entry " + std::to_string(i));
    }
    const double numeric = (up - down) / (2.0 * eps);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), floor});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

}  // namespace gparse
