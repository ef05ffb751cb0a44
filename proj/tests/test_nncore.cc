#include <cmath>

#include "doctest.h"
#include "gparse/errors.h"
#include "gparse/params.h"
#include "gparse/tensor.h"

using namespace gparse;

TEST_SUITE("nncore") {
  TEST_CASE("lookup") {
    Tensor id(3, 3);
    for (size_t i = 0; i < 3; ++i) id(i, i) = 1.0;
    CHECK(lookup(id, 1) == Vec{0, 1, 0});
    CHECK_THROWS_AS(lookup(id, 3), Error);
  }

  TEST_CASE("affine and affine_tanh") {
    Tensor zero(2, 3);
    CHECK(affine_tanh(zero, Vec{1, 2, 3}) == Vec{0, 0});
    Tensor one(1, 1, 1.0);
    CHECK(affine_tanh(one, Vec{0.5})[0] == doctest::Approx(0.462117).epsilon(1e-6));
    Tensor id(2, 2);
    id(0, 0) = id(1, 1) = 1.0;
    CHECK(affine(id, Vec{3, -4}) == Vec{3, -4});
    CHECK_THROWS_AS(affine(id, Vec{1, 2, 3}), Error);
  }

  TEST_CASE("affine backward matches finite differences") {
    Rng rng(3);
    Tensor m(3, 4);
    init_uniform(m, 1.0, rng);
    Vec z{0.3, -0.2, 0.9, -0.7};
    const Vec w{0.5, -1.5, 2.0};
    auto loss = [&] {
      const Vec h = affine_tanh(m, z);
      return w[0] * h[0] + w[1] * h[1] + w[2] * h[2];
    };
    const Vec h = affine_tanh(m, z);
    Vec g_pre(3);
    tanh_backward(h, w, g_pre);
    Tensor gm(3, 4);
    Vec gz(4, 0.0);
    affine_backward(m, z, g_pre, &gm, gz);
    CHECK(grad_check(loss, m.values(), gm.values()) < 1e-6);
    CHECK(grad_check(loss, z, gz) < 1e-6);
  }

  TEST_CASE("dropout mask statistics") {
    Rng rng(42);
    const Vec ones(1'000'000, 1.0);
    const DropoutResult r = dropout_mask(ones, 0.25, rng);
    double zeros = 0;
    for (size_t i = 0; i < r.out.size(); ++i) {
      zeros += r.mask[i] == 0.0;
      CHECK_EQ(r.out[i], r.mask[i]);
    }
    const double frac = zeros / double(ones.size());
    CHECK(frac > 0.249);
    CHECK(frac < 0.251);

    const DropoutResult id = dropout_mask(Vec{1, 2}, 0.0, rng);
    CHECK(id.out == Vec{1, 2});
    CHECK(id.mask == Vec{1, 1});
  }

  TEST_CASE("eval rescale equals the train-time expectation") {
    CHECK(dropout_rescale_eval(Vec{1, 1}, 0.25) == Vec{0.75, 0.75});
    CHECK(dropout_rescale_eval(Vec{2, 3}, 0.0) == Vec{2, 3});
    Rng rng(9);
    const Vec v{1.0, -2.0, 0.5};
    Vec mean(3, 0.0);
    const int trials = 200000;
    for (int i = 0; i < trials; ++i) {
      const auto r = dropout_mask(v, 0.25, rng);
      for (int j = 0; j < 3; ++j) mean[j] += r.out[j] / trials;
    }
    const Vec eval = dropout_rescale_eval(v, 0.25);
    for (int j = 0; j < 3; ++j) {
      // 4 standard errors of a Bernoulli(0.75) mean scaled by |v|.
      const double tol = 4.0 * std::abs(v[j]) * std::sqrt(0.25 * 0.75 / trials);
      CHECK(std::abs(mean[j] - eval[j]) < tol);
    }
  }

  TEST_CASE("sgd update with fan-in scaling") {
    Tensor p(1, 1, 1.0);
    sgd_update(p, Tensor(1, 1, 1.0), 0.15, 1);
    CHECK(p(0, 0) == doctest::Approx(0.85));
    Tensor q(2, 1, 1.0);
    sgd_update(q, Tensor(2, 1), 0.15, 7);
    CHECK(q(0, 0) == 1.0);
    // fan-in K(D+T) = 3 * (2 + 1) = 9.
    Tensor m(2, 1);
    m(0, 0) = 1.0;
    m(1, 0) = -1.0;
    Tensor g(2, 1, 0.9);
    sgd_update(m, g, 0.15, 9);
    CHECK(m(0, 0) == doctest::Approx(1.0 - 0.015));
    CHECK(m(1, 0) == doctest::Approx(-1.0 - 0.015));
    CHECK_THROWS_AS(sgd_update(m, Tensor(1, 1), 0.1, 1), Error);
  }

  TEST_CASE("grad_check on a quadratic") {
    Vec x{3.0};
    const Vec g{6.0};
    CHECK(grad_check([&] { return x[0] * x[0]; }, x, g) < 1e-8);
    CHECK(x[0] == 3.0);
    Vec y{0.0};
    CHECK_THROWS_AS(grad_check([&] { return std::log(y[0]); }, y, Vec{1.0}), Error);
  }

  TEST_CASE("model params shapes and serialization") {
    Rng rng(5);
    const Dims dims{4, 3, 6, 3, 3};
    const ModelParams p = ModelParams::create(dims, 10, 7, 9, 0.25, rng);
    CHECK(p.words.rows() == 4);
    CHECK(p.words.cols() == 10);
    CHECK(p.tags.rows() == 3);
    CHECK(p.tags.cols() == 7);
    REQUIRE(p.compose.size() == 3);
    for (int k = 1; k <= 3; ++k) {
      CHECK(p.compose[k - 1].rows() == 4);
      CHECK(p.compose[k - 1].cols() == size_t(k * 7));
    }
    CHECK(p.hidden.rows() == 6);
    CHECK(p.hidden.cols() == 21);
    CHECK(p.output.rows() == 9);
    CHECK(p.output.cols() == 6);
    CHECK(p.pad.rows() == 7);
    const double bound = 1.0 / std::sqrt(21.0);
    for (double v : p.hidden.values()) CHECK(std::abs(v) <= bound);

    CHECK(ModelParams::deserialize(p.serialize()).bit_equal(p));
    const ModelParams f = ModelParams::deserialize(p.serialize(Precision::kFloat32));
    CHECK(f.hidden(0, 0) == double(float(p.hidden(0, 0))));
    CHECK(ModelParams::deserialize(f.serialize(Precision::kFloat32)).bit_equal(f));

    std::string bad = p.serialize();
    bad[0] = 'X';
    CHECK_THROWS_AS(ModelParams::deserialize(bad), Error);
    CHECK_THROWS_AS(ModelParams::deserialize(p.serialize().substr(0, 40)), Error);
    CHECK_THROWS_AS(ModelParams::create({4, 3, 6, 4, 3}, 10, 7, 9, 0.0, rng), Error);
    CHECK_THROWS_AS(ModelParams::create({4, 3, 6, 3, 1}, 10, 7, 9, 0.0, rng), Error);
    CHECK_THROWS_AS(ModelParams::create(dims, 10, 7, 9, 1.0, rng), Error);
  }
}
