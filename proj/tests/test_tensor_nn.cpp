// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "adamrel/errors.hpp"
#include "adamrel/rng.hpp"
#include "adamrel/tensor_nn.hpp"
#include "test_util.hpp"

namespace adamrel::nn {
namespace {

MlpSpec spec_of(std::vector<std::size_t> sizes, Activation act, OutputHead head) {
  MlpSpec s{std::move(sizes), act, head};
  s.validate();
  return s;
}

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  for (auto& x : m.data) x = rng.normal();
  return m;
}

FlatParams random_params(const MlpSpec& spec, Rng& rng, double scale = 0.7) {
  auto p = make_params(spec);
  for (auto& x : p.values) x = scale * rng.normal();
  return p;
}

// Naive evaluator: W is stored row-major as [fan_out][fan_in], then biases.
Matrix reference_forward(const MlpSpec& spec, const FlatParams& p, const Matrix& x) {
  Matrix a = x;
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l) {
    const std::size_t in = spec.layer_sizes[l], out = spec.layer_sizes[l + 1];
    Matrix z(a.rows, out);
    for (std::size_t r = 0; r < a.rows; ++r)
      for (std::size_t o = 0; o < out; ++o) {
        double s = p.values[offset + in * out + o];
        for (std::size_t i = 0; i < in; ++i) s += p.values[offset + o * in + i] * a(r, i);
        const bool hidden = l + 2 < spec.layer_sizes.size();
        z(r, o) = !hidden ? s : spec.activation == Activation::Tanh ? std::tanh(s) : std::max(0.0, s);
      }
    offset += (in + 1) * out;
    a = std::move(z);
  }
  return a;
}

// Loss sum_b <U_b, out_b> evaluated through the reference forward pass.
double upstream_loss(const MlpSpec& spec, const FlatParams& p, const Matrix& x, const Matrix& u) {
  const auto out = reference_forward(spec, p, x);
  return std::inner_product(out.data.begin(), out.data.end(), u.data.begin(), 0.0);
}

HeadGrads heads_from(const MlpSpec& spec, const Matrix& u) {
  HeadGrads g;
  const std::size_t n = spec.head.actions;
  if (spec.head.kind != OutputHead::Kind::Scalar) {
    g.d_logits = Matrix(u.rows, n);
    for (std::size_t r = 0; r < u.rows; ++r)
      for (std::size_t c = 0; c < n; ++c) g.d_logits(r, c) = u(r, c);
  }
  if (spec.head.kind != OutputHead::Kind::Categorical)
    for (std::size_t r = 0; r < u.rows; ++r) g.d_values.push_back(u(r, u.cols - 1));
  return g;
}

TEST(Spec, Validation) {
  EXPECT_THROW(spec_of({3}, Activation::Tanh, OutputHead::scalar()), std::invalid_argument);
  EXPECT_THROW(spec_of({3, 2}, Activation::Tanh, OutputHead::scalar()), std::invalid_argument);
  EXPECT_THROW(spec_of({3, 0, 1}, Activation::Tanh, OutputHead::scalar()), std::invalid_argument);
  EXPECT_THROW(spec_of({3, 0}, Activation::Tanh, OutputHead::categorical(0)), std::invalid_argument);
  EXPECT_NO_THROW(spec_of({3, 4, 5}, Activation::ReLU, OutputHead::dual(4)));
}

TEST(Layout, SizesAndOffsets) {
  const auto spec = spec_of({5, 7, 3, 4}, Activation::Tanh, OutputHead::categorical(4));
  const auto p = make_params(spec);
  EXPECT_EQ(p.size(), 6u * 7 + 8u * 3 + 4u * 4);
  std::size_t prev = 0;
  for (std::size_t l = 0; l < p.layout.size(); ++l) {
    const auto& L = p.layout[l];
    EXPECT_EQ(L.fan_in, spec.layer_sizes[l]);
    EXPECT_EQ(L.fan_out, spec.layer_sizes[l + 1]);
    EXPECT_EQ(L.weight_offset, prev);
    EXPECT_EQ(L.bias_offset, L.weight_offset + L.fan_in * L.fan_out);
    prev = L.bias_offset + L.fan_out;
  }
}

TEST(Init, DeterministicZeroBiasesAndSeedSensitive) {
  const auto spec = spec_of({6, 16, 16, 5}, Activation::Tanh, OutputHead::dual(4));
  const auto a = init_params(spec, 42), b = init_params(spec, 42), c = init_params(spec, 43);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.values, c.values);
  for (const auto& L : a.layout)
    for (std::size_t o = 0; o < L.fan_out; ++o) EXPECT_EQ(a.values[L.bias_offset + o], 0.0);
}

TEST(Init, OrthogonalRowsWithGains) {
  const auto spec = spec_of({12, 8, 3}, Activation::Tanh, OutputHead::dual(2));
  const auto p = init_params(spec, 9);
  const auto& h = p.layout[0];  // 8 x 12: rows orthogonal with norm sqrt(2)
  for (std::size_t a = 0; a < 8; ++a)
    for (std::size_t b = 0; b < 8; ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < 12; ++i)
        dot += p.values[h.weight_offset + a * 12 + i] * p.values[h.weight_offset + b * 12 + i];
      EXPECT_NEAR(dot, a == b ? 2.0 : 0.0, 1e-12);
    }
  const auto& out = p.layout[1];  // 3 x 8: two policy rows, one value row
  for (std::size_t o = 0; o < 3; ++o) {
    double sq = 0.0;
    for (std::size_t i = 0; i < 8; ++i) sq += std::pow(p.values[out.weight_offset + o * 8 + i], 2);
    EXPECT_NEAR(std::sqrt(sq), o < 2 ? 0.01 : 1.0, 1e-12);
  }
}

TEST(Forward, ZeroParamsGiveZeroOutputs) {
  const auto spec = spec_of({4, 6, 3}, Activation::Tanh, OutputHead::categorical(3));
  Rng rng(1);
  const auto out = forward(spec, make_params(spec), random_matrix(5, 4, rng));
  for (double x : out.logits.data) EXPECT_EQ(x, 0.0);
  EXPECT_TRUE(out.values.empty());
}

TEST(Forward, IdentityLinearLayer) {
  const auto spec = spec_of({3, 3}, Activation::Tanh, OutputHead::categorical(3));
  auto p = make_params(spec);
  for (std::size_t i = 0; i < 3; ++i) p.values[i * 3 + i] = 1.0;
  Rng rng(2);
  const auto x = random_matrix(4, 3, rng);
  EXPECT_EQ(forward(spec, p, x).logits, x);
}

TEST(Forward, MatchesReferenceEvaluator) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto act = trial % 2 ? Activation::Tanh : Activation::ReLU;
    const std::size_t n = 1 + rng.below(4);
    const auto spec = spec_of({1 + rng.below(5), 1 + rng.below(6), n + 1}, act, OutputHead::dual(n));
    const auto p = random_params(spec, rng);
    const auto x = random_matrix(1 + rng.below(5), spec.input_dim(), rng);
    const auto ref = reference_forward(spec, p, x);
    const auto out = forward(spec, p, x);
    for (std::size_t r = 0; r < x.rows; ++r) {
      for (std::size_t c = 0; c < n; ++c) EXPECT_NEAR(out.logits(r, c), ref(r, c), 1e-12);
      EXPECT_NEAR(out.values[r], ref(r, n), 1e-12);
    }
  }
}

TEST(Forward, BatchEqualsRowwise) {
  Rng rng(4);
  const auto spec = spec_of({5, 9, 9, 3}, Activation::Tanh, OutputHead::categorical(3));
  const auto p = init_params(spec, 4);
  const auto x = random_matrix(7, 5, rng);
  const auto batch = forward(spec, p, x);
  for (std::size_t r = 0; r < x.rows; ++r) {
    Matrix one(1, 5);
    std::copy(x.row(r).begin(), x.row(r).end(), one.data.begin());
    const auto single = forward(spec, p, one);
    for (std::size_t c = 0; c < 3; ++c)
      EXPECT_TRUE(adamrel::testing::within_ulps(single.logits(0, c), batch.logits(r, c), 8));
  }
}

TEST(Forward, RejectsWidthMismatch) {
  const auto spec = spec_of({4, 2}, Activation::Tanh, OutputHead::categorical(2));
  EXPECT_THROW(forward(spec, make_params(spec), Matrix(2, 3)), std::invalid_argument);
  FlatParams short_params = make_params(spec);
  short_params.values.pop_back();
  EXPECT_THROW(forward(spec, short_params, Matrix(2, 4)), std::invalid_argument);
}

TEST(Backward, ZeroUpstreamGivesZeroGradient) {
  Rng rng(5);
  const auto spec = spec_of({3, 5, 2}, Activation::Tanh, OutputHead::dual(1));
  const auto p = random_params(spec, rng);
  const auto g = backward(spec, p, random_matrix(4, 3, rng), HeadGrads{});
  for (double x : g) EXPECT_EQ(x, 0.0);
}

TEST(Backward, LinearLeastSquaresClosedForm) {
  Rng rng(6);
  const auto spec = spec_of({3, 2}, Activation::Tanh, OutputHead::categorical(2));
  const auto p = random_params(spec, rng);
  const auto x = random_matrix(1, 3, rng);
  const std::vector<double> y{0.3, -1.2};
  const auto out = forward(spec, p, x);
  HeadGrads up;
  up.d_logits = Matrix(1, 2);
  for (std::size_t o = 0; o < 2; ++o) up.d_logits(0, o) = out.logits(0, o) - y[o];
  const auto g = backward(spec, p, x, up);
  for (std::size_t o = 0; o < 2; ++o) {
    const double r = out.logits(0, o) - y[o];
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(g[o * 3 + i], r * x(0, i), 1e-14);
    EXPECT_NEAR(g[6 + o], r, 1e-14);
  }
}

TEST(Backward, MatchesCentralFiniteDifferences) {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto act = trial % 2 ? Activation::Tanh : Activation::ReLU;
    const std::size_t n = 1 + rng.below(3);
    const int kind = trial % 3;
    const auto head = kind == 0 ? OutputHead::scalar()
                      : kind == 1 ? OutputHead::categorical(n)
                                  : OutputHead::dual(n);
    const auto spec = spec_of({1 + rng.below(4), 2 + rng.below(5), 2 + rng.below(5), head.width()}, act, head);
    auto p = random_params(spec, rng);
    const auto x = random_matrix(4, spec.input_dim(), rng);
    const auto u = random_matrix(4, head.width(), rng);
    const auto g = backward(spec, p, x, heads_from(spec, u));
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double saved = p.values[i];
      p.values[i] = saved + 1e-5;
      const double up = upstream_loss(spec, p, x, u);
      p.values[i] = saved - 1e-5;
      const double down = upstream_loss(spec, p, x, u);
      p.values[i] = saved;
      const double fd = (up - down) / 2e-5;
      const double err = std::fabs(g[i]) < 1e-8 && std::fabs(fd) < 1e-8
                             ? std::fabs(g[i] - fd)
                             : std::fabs(g[i] - fd) / std::max(std::fabs(g[i]), std::fabs(fd));
      worst = std::max(worst, err);
    }
    EXPECT_LT(worst, 1e-4) << "trial " << trial;
  }
}

TEST(Softmax, UniformLogits) {
  for (std::size_t n : {1u, 2u, 5u, 18u}) {
    const std::vector<double> logits(n, 0.37);
    const auto p = softmax(logits);
    for (double x : p) EXPECT_NEAR(x, 1.0 / static_cast<double>(n), 1e-15);
    EXPECT_NEAR(categorical_entropy(logits), std::log(static_cast<double>(n)), 1e-12);
  }
}

TEST(Softmax, StableForLargeLogits) {
  const std::vector<double> logits{1000.0, 0.0};
  const auto p = softmax(logits);
  EXPECT_NEAR(p[0], 1.0, 1e-15);
  EXPECT_TRUE(std::isfinite(p[1]));
  const auto lp = log_softmax(logits);
  EXPECT_NEAR(lp[1], -1000.0, 1e-9);
  EXPECT_GE(categorical_entropy(logits), 0.0);
}

TEST(Softmax, SimplexProperties) {
  Rng rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(10);
    std::vector<double> logits(n);
    for (auto& x : logits) x = rng.normal() * 5.0;
    const auto p = softmax(logits);
    const auto lp = log_softmax(logits);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_GE(p[i], 0.0);
      EXPECT_NEAR(std::exp(lp[i]), p[i], 1e-12);
    }
    const double h = categorical_entropy(logits);
    EXPECT_GE(h, -1e-15);
    EXPECT_LE(h, std::log(static_cast<double>(n)) + 1e-12);
  }
}

TEST(Softmax, RejectsNonFiniteLogits) {
  const std::vector<double> bad{0.0, std::nan("")};
  EXPECT_THROW(softmax(bad), PoisonedGradientError);
  Rng rng(1);
  const std::vector<double> inf{INFINITY, 0.0};
  EXPECT_THROW(softmax_categorical(inf, rng), PoisonedGradientError);
}

TEST(Categorical, SamplingFrequencies) {
  Rng rng(9);
  const std::vector<double> logits{0.0, std::log(2.0), std::log(5.0)};
  const auto p = softmax(logits);
  std::vector<int> counts(3, 0);
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const auto s = softmax_categorical(logits, rng);
    ++counts[s.action];
    EXPECT_NEAR(s.log_prob, std::log(p[s.action]), 1e-12);
    EXPECT_NEAR(s.entropy, categorical_entropy(logits), 1e-15);
  }
  for (std::size_t a = 0; a < 3; ++a) {
    const double sigma = std::sqrt(n * p[a] * (1 - p[a]));
    EXPECT_NEAR(counts[a], n * p[a], 4 * sigma);
  }
}

TEST(Argmax, LowestIndexOnTies) {
  EXPECT_EQ(argmax(std::vector<double>{1, 3, 2}), 1u);
  EXPECT_EQ(argmax(std::vector<double>{5, 5}), 0u);
  EXPECT_EQ(argmax(std::vector<double>{-1, 4, 4, 4}), 1u);
  EXPECT_THROW(argmax(std::vector<double>{}), std::invalid_argument);
}

}  // namespace
}  // namespace adamrel::nn
