// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "adamrel/rng.hpp"

namespace adamrel::nn {

/// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }

  bool operator==(const Matrix&) const = default;
};

enum class Activation { Tanh, ReLU };

/// How the final layer's outputs are interpreted.
struct OutputHead {
  enum class Kind { Scalar, Categorical, Dual };

  Kind kind = Kind::Scalar;
  /// Number of logits for Categorical and Dual heads.
  std::size_t actions = 0;

  static OutputHead scalar() { return {Kind::Scalar, 0}; }
  static OutputHead categorical(std::size_t n) { return {Kind::Categorical, n}; }
  /// n logits followed by one value output.
  static OutputHead dual(std::size_t n) { return {Kind::Dual, n}; }

  std::size_t width() const noexcept;
};

struct MlpSpec {
  /// input, hidden..., output. The output size must equal head.width().
  std::vector<std::size_t> layer_sizes;
  Activation activation = Activation::Tanh;
  OutputHead head;

  void validate() const;
  std::size_t input_dim() const { return layer_sizes.front(); }
  std::size_t layer_count() const { return layer_sizes.size() - 1; }
};

struct LayerLayout {
  std::size_t fan_in = 0;
  std::size_t fan_out = 0;
  /// fan_out x fan_in row-major weights start here; biases follow them.
  std::size_t weight_offset = 0;
  std::size_t bias_offset = 0;

  bool operator==(const LayerLayout&) const = default;
};

/// All weights and biases in one contiguous vector, layer by layer.
struct FlatParams {
  std::vector<double> values;
  std::vector<LayerLayout> layout;

  std::size_t size() const noexcept { return values.size(); }
  bool operator==(const FlatParams&) const = default;
};

/// Zero-valued parameters with the canonical layout for `spec`.
FlatParams make_params(const MlpSpec& spec);

/// Orthogonal initialization: hidden layers scaled by sqrt(2), policy logits
/// by 0.01, value outputs by 1.0; biases zero. Deterministic in seed.
FlatParams init_params(const MlpSpec& spec, std::uint64_t seed);

struct HeadOutputs {
  /// batch x actions; empty for Scalar heads.
  Matrix logits;
  /// One per batch row; empty for Categorical heads.
  std::vector<double> values;
};

struct HeadGrads {
  Matrix d_logits;
  std::vector<double> d_values;
};

/// Activations kept for the backward pass. activations[0] is the input and
/// activations[l + 1] the (post-activation) output of layer l.
struct ForwardTrace {
  std::vector<Matrix> activations;
};

ForwardTrace forward_trace(const MlpSpec& spec, const FlatParams& params,
                           const Matrix& input);

/// Batched forward pass. Throws std::invalid_argument on a width mismatch.
HeadOutputs forward(const MlpSpec& spec, const FlatParams& params,
                    const Matrix& input);

/// Splits the raw output layer of a trace into heads.
HeadOutputs split_heads(const MlpSpec& spec, const Matrix& raw);

/// Gradient of sum_b <upstream_b, outputs_b> with respect to the flat
/// parameters. Missing head gradients (empty members) count as zero.
std::vector<double> backward(const MlpSpec& spec, const FlatParams& params,
                             const ForwardTrace& trace, const HeadGrads& upstream);

std::vector<double> backward(const MlpSpec& spec, const FlatParams& params,
                             const Matrix& input, const HeadGrads& upstream);

/// Max-subtracted softmax. Throws PoisonedGradientError on non-finite logits.
std::vector<double> softmax(std::span<const double> logits);
std::vector<double> log_softmax(std::span<const double> logits);

struct CategoricalSample {
  std::size_t action = 0;
  double log_prob = 0.0;
  double entropy = 0.0;
};

/// Samples an action from softmax(logits) and reports its log-probability
/// and the distribution's entropy.
CategoricalSample softmax_categorical(std::span<const double> logits, Rng& rng);

/// Entropy of softmax(logits), in nats.
double categorical_entropy(std::span<const double> logits);

/// Index of the largest element; ties resolve to the lowest index.
std::size_t argmax(std::span<const double> values);

}  // namespace adamrel::nn
