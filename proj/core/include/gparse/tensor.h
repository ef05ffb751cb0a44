#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace gparse {

using Rng = std::mt19937_64;
using Vec = std::vector<double>;

// Lookup tables and the padding vector are initialized uniform in
// [-kLookupInitBound, kLookupInitBound].
inline constexpr double kLookupInitBound = 0.1;

// Dense column-major matrix of doubles. Lookup-table entries are columns, so
// `col(i)` is the embedding of dictionary entry i.
class Tensor {
 public:
  Tensor() = default;
  Tensor(size_t rows, size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  size_t size() const { return data_.size(); }

  double& operator()(size_t r, size_t c) { return data_[c * rows_ + r]; }
  double operator()(size_t r, size_t c) const { return data_[c * rows_ + r]; }

  std::span<double> col(size_t c) { return {data_.data() + c * rows_, rows_}; }
  std::span<const double> col(size_t c) const { return {data_.data() + c * rows_, rows_}; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  void fill(double v);
  bool same_shape(const Tensor& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  // Bitwise equality of shape and contents.
  bool bit_equal(const Tensor& o) const;

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<double> data_;
};

// Column `index` of `table`. Throws kIndexOutOfRange.
Vec lookup(const Tensor& table, size_t index);

// M·z and tanh(M·z). Throws kShapeMismatch when cols(M) != len(z).
Vec affine(const Tensor& m, std::span<const double> z);
Vec affine_tanh(const Tensor& m, std::span<const double> z);

// Accumulates grad_m += g·zᵀ (when grad_m is non-null) and grad_z += Mᵀ·g.
void affine_backward(const Tensor& m, std::span<const double> z, std::span<const double> g,
                     Tensor* grad_m, std::span<double> grad_z);

// grad_in[i] = grad_out[i]·(1 − out[i]²), where out = tanh(pre).
void tanh_backward(std::span<const double> out, std::span<const double> grad_out,
                   std::span<double> grad_in);

// Training-time dropout: each element zeroed independently with probability
// p_drop. The 0/1 mask is returned for the backward pass. No rescaling.
struct DropoutResult {
  Vec out;
  Vec mask;
};
DropoutResult dropout_mask(std::span<const double> v, double p_drop, Rng& rng);

// Evaluation-time counterpart: v·(1 − p_drop).
Vec dropout_rescale_eval(std::span<const double> v, double p_drop);

// param ← param − (base_lr / fan_in)·grad. Throws kShapeMismatch.
void sgd_update(Tensor& param, const Tensor& grad, double base_lr, size_t fan_in);
void sgd_update(std::span<double> param, std::span<const double> grad, double base_lr,
                size_t fan_in);

// Entries uniform in [−bound, bound].
void init_uniform(Tensor& t, double bound, Rng& rng);

// Central differences of `f` with respect to every entry of `params`,
// compared with `analytic`. Returns max |a − n| / max(|a|, |n|, floor).
// `params` is perturbed in place and restored. Throws kNonFiniteValue.
double grad_check(const std::function<double()>& f, std::span<double> params,
                  std::span<const double> analytic, double eps = 1e-5, double floor = 1e-6);

}  // namespace gparse
