// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "adamrel/tensor_nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "adamrel/errors.hpp"

namespace adamrel::nn {

std::size_t OutputHead::width() const noexcept {
  switch (kind) {
    case Kind::Scalar: return 1;
    case Kind::Categorical: return actions;
    case Kind::Dual: return actions + 1;
  }
  return 0;
}

void MlpSpec::validate() const {
  if (layer_sizes.size() < 2)
    throw std::invalid_argument("mlp: need at least input and output sizes");
  for (std::size_t s : layer_sizes)
    if (s == 0) throw std::invalid_argument("mlp: layer sizes must be positive");
  if (head.kind != OutputHead::Kind::Scalar && head.actions < 1)
    throw std::invalid_argument("mlp: categorical head needs at least one action");
  if (layer_sizes.back() != head.width()) {
    throw std::invalid_argument("mlp: output size " + std::to_string(layer_sizes.back()) +
                                " does not match head width " +
                                std::to_string(head.width()));
  }
}

FlatParams make_params(const MlpSpec& spec) {
  spec.validate();
  FlatParams params;
  std::size_t offset = 0;
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    LayerLayout layer;
    layer.fan_in = spec.layer_sizes[l];
    layer.fan_out = spec.layer_sizes[l + 1];
    layer.weight_offset = offset;
    offset += layer.fan_in * layer.fan_out;
    layer.bias_offset = offset;
    offset += layer.fan_out;
    params.layout.push_back(layer);
  }
  params.values.assign(offset, 0.0);
  return params;
}

namespace {

// Fills a fan_out x fan_in block with a (semi-)orthogonal matrix: Gaussian
// columns orthonormalized with modified Gram-Schmidt, transposed when wide.
void orthogonal_fill(std::span<double> w, std::size_t fan_out, std::size_t fan_in,
                     Rng& rng) {
  const std::size_t tall = std::max(fan_out, fan_in);
  const std::size_t narrow = std::min(fan_out, fan_in);
  std::vector<double> q(tall * narrow);  // column-major: column c at c * tall
  for (double& x : q) x = rng.normal();
  for (std::size_t c = 0; c < narrow; ++c) {
    double* col = q.data() + c * tall;
    for (std::size_t p = 0; p < c; ++p) {
      const double* prev = q.data() + p * tall;
      double dot = 0.0;
      for (std::size_t r = 0; r < tall; ++r) dot += prev[r] * col[r];
      for (std::size_t r = 0; r < tall; ++r) col[r] -= dot * prev[r];
    }
    double norm = 0.0;
    for (std::size_t r = 0; r < tall; ++r) norm += col[r] * col[r];
    norm = std::sqrt(norm);
    for (std::size_t r = 0; r < tall; ++r) col[r] /= norm;
  }
  for (std::size_t o = 0; o < fan_out; ++o) {
    for (std::size_t i = 0; i < fan_in; ++i) {
      w[o * fan_in + i] = fan_out >= fan_in ? q[i * tall + o] : q[o * tall + i];
    }
  }
}

double activate(Activation act, double z) {
  return act == Activation::Tanh ? std::tanh(z) : (z > 0.0 ? z : 0.0);
}

// Derivative expressed through the activation output a.
double activate_grad(Activation act, double a) {
  return act == Activation::Tanh ? 1.0 - a * a : (a > 0.0 ? 1.0 : 0.0);
}

void check_params(const MlpSpec& spec, const FlatParams& params) {
  spec.validate();
  if (params.layout.size() != spec.layer_count())
    throw std::invalid_argument("mlp: parameter layout does not match spec");
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const auto& layer = params.layout[l];
    if (layer.fan_in != spec.layer_sizes[l] || layer.fan_out != spec.layer_sizes[l + 1])
      throw std::invalid_argument("mlp: parameter layout does not match spec");
  }
  const auto& last = params.layout.back();
  if (params.values.size() != last.bias_offset + last.fan_out)
    throw std::invalid_argument("mlp: parameter vector has the wrong length");
}

}  // namespace

FlatParams init_params(const MlpSpec& spec, std::uint64_t seed) {
  FlatParams params = make_params(spec);
  Rng rng(seed);
  const std::size_t layers = spec.layer_count();
  for (std::size_t l = 0; l < layers; ++l) {
    const auto& layer = params.layout[l];
    std::span<double> w(params.values.data() + layer.weight_offset,
                        layer.fan_in * layer.fan_out);
    orthogonal_fill(w, layer.fan_out, layer.fan_in, rng);
    if (l + 1 < layers) {
      for (double& x : w) x *= std::sqrt(2.0);
      continue;
    }
    for (std::size_t o = 0; o < layer.fan_out; ++o) {
      double gain = 1.0;
      switch (spec.head.kind) {
        case OutputHead::Kind::Scalar: gain = 1.0; break;
        case OutputHead::Kind::Categorical: gain = 0.01; break;
        case OutputHead::Kind::Dual: gain = o < spec.head.actions ? 0.01 : 1.0; break;
      }
      for (std::size_t i = 0; i < layer.fan_in; ++i) w[o * layer.fan_in + i] *= gain;
    }
  }
  return params;
}

ForwardTrace forward_trace(const MlpSpec& spec, const FlatParams& params,
                           const Matrix& input) {
  check_params(spec, params);
  if (input.cols != spec.input_dim()) {
    throw std::invalid_argument("mlp: input width " + std::to_string(input.cols) +
                                " does not match spec input " +
                                std::to_string(spec.input_dim()));
  }
  ForwardTrace trace;
  trace.activations.reserve(spec.layer_count() + 1);
  trace.activations.push_back(input);
  const std::size_t batch = input.rows;
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const auto& layer = params.layout[l];
    const double* w = params.values.data() + layer.weight_offset;
    const double* b = params.values.data() + layer.bias_offset;
    const Matrix& x = trace.activations.back();
    Matrix out(batch, layer.fan_out);
    const bool hidden = l + 1 < spec.layer_count();
    for (std::size_t r = 0; r < batch; ++r) {
      const double* xr = x.data.data() + r * layer.fan_in;
      double* yr = out.data.data() + r * layer.fan_out;
      for (std::size_t o = 0; o < layer.fan_out; ++o) {
        const double* wo = w + o * layer.fan_in;
        double z = b[o];
        for (std::size_t i = 0; i < layer.fan_in; ++i) z += wo[i] * xr[i];
        yr[o] = hidden ? activate(spec.activation, z) : z;
      }
    }
    trace.activations.push_back(std::move(out));
  }
  return trace;
}

HeadOutputs split_heads(const MlpSpec& spec, const Matrix& raw) {
  HeadOutputs out;
  const std::size_t n = spec.head.actions;
  switch (spec.head.kind) {
    case OutputHead::Kind::Scalar:
      out.values.resize(raw.rows);
      for (std::size_t r = 0; r < raw.rows; ++r) out.values[r] = raw(r, 0);
      break;
    case OutputHead::Kind::Categorical:
      out.logits = raw;
      break;
    case OutputHead::Kind::Dual:
      out.logits = Matrix(raw.rows, n);
      out.values.resize(raw.rows);
      for (std::size_t r = 0; r < raw.rows; ++r) {
        std::copy_n(raw.data.data() + r * raw.cols, n, out.logits.data.data() + r * n);
        out.values[r] = raw(r, n);
      }
      break;
  }
  return out;
}

HeadOutputs forward(const MlpSpec& spec, const FlatParams& params, const Matrix& input) {
  auto trace = forward_trace(spec, params, input);
  return split_heads(spec, trace.activations.back());
}

std::vector<double> backward(const MlpSpec& spec, const FlatParams& params,
                             const ForwardTrace& trace, const HeadGrads& upstream) {
  check_params(spec, params);
  if (trace.activations.size() != spec.layer_count() + 1)
    throw std::invalid_argument("mlp: trace does not match spec");
  const std::size_t batch = trace.activations.front().rows;
  const std::size_t width = spec.head.width();
  const std::size_t n = spec.head.actions;

  Matrix delta(batch, width);
  const bool has_logits = !upstream.d_logits.data.empty();
  const bool has_values = !upstream.d_values.empty();
  if (has_logits) {
    if (spec.head.kind == OutputHead::Kind::Scalar || upstream.d_logits.rows != batch ||
        upstream.d_logits.cols != n)
      throw std::invalid_argument("mlp: logit gradient shape mismatch");
    for (std::size_t r = 0; r < batch; ++r)
      std::copy_n(upstream.d_logits.data.data() + r * n, n, delta.data.data() + r * width);
  }
  if (has_values) {
    if (spec.head.kind == OutputHead::Kind::Categorical || upstream.d_values.size() != batch)
      throw std::invalid_argument("mlp: value gradient shape mismatch");
    const std::size_t col = spec.head.kind == OutputHead::Kind::Dual ? n : 0;
    for (std::size_t r = 0; r < batch; ++r) delta(r, col) = upstream.d_values[r];
  }

  std::vector<double> grads(params.values.size(), 0.0);
  for (std::size_t l = spec.layer_count(); l-- > 0;) {
    const auto& layer = params.layout[l];
    const Matrix& x = trace.activations[l];
    double* gw = grads.data() + layer.weight_offset;
    double* gb = grads.data() + layer.bias_offset;
    for (std::size_t r = 0; r < batch; ++r) {
      const double* xr = x.data.data() + r * layer.fan_in;
      const double* dr = delta.data.data() + r * layer.fan_out;
      for (std::size_t o = 0; o < layer.fan_out; ++o) {
        const double d = dr[o];
        if (d == 0.0) continue;
        gb[o] += d;
        double* gwo = gw + o * layer.fan_in;
        for (std::size_t i = 0; i < layer.fan_in; ++i) gwo[i] += d * xr[i];
      }
    }
    if (l == 0) break;
    const double* w = params.values.data() + layer.weight_offset;
    Matrix prev(batch, layer.fan_in);
    for (std::size_t r = 0; r < batch; ++r) {
      const double* dr = delta.data.data() + r * layer.fan_out;
      double* pr = prev.data.data() + r * layer.fan_in;
      for (std::size_t o = 0; o < layer.fan_out; ++o) {
        const double d = dr[o];
        if (d == 0.0) continue;
        const double* wo = w + o * layer.fan_in;
        for (std::size_t i = 0; i < layer.fan_in; ++i) pr[i] += d * wo[i];
      }
      const double* ar = x.data.data() + r * layer.fan_in;
      for (std::size_t i = 0; i < layer.fan_in; ++i)
        pr[i] *= activate_grad(spec.activation, ar[i]);
    }
    delta = std::move(prev);
  }
  return grads;
}

std::vector<double> backward(const MlpSpec& spec, const FlatParams& params,
                             const Matrix& input, const HeadGrads& upstream) {
  return backward(spec, params, forward_trace(spec, params, input), upstream);
}

namespace {

void check_logits(std::span<const double> logits) {
  if (logits.empty()) throw std::invalid_argument("softmax: empty logits");
  for (double x : logits)
    if (!std::isfinite(x)) throw PoisonedGradientError("softmax: non-finite logit");
}

}  // namespace

std::vector<double> log_softmax(std::span<const double> logits) {
  check_logits(logits);
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double x : logits) sum += std::exp(x - mx);
  const double log_z = mx + std::log(sum);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - log_z;
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  auto out = log_softmax(logits);
  for (double& x : out) x = std::exp(x);
  return out;
}

double categorical_entropy(std::span<const double> logits) {
  const auto logp = log_softmax(logits);
  double h = 0.0;
  for (double lp : logp) h -= std::exp(lp) * lp;
  return h;
}

CategoricalSample softmax_categorical(std::span<const double> logits, Rng& rng) {
  const auto logp = log_softmax(logits);
  CategoricalSample sample;
  for (double lp : logp) sample.entropy -= std::exp(lp) * lp;
  const double u = rng.uniform();
  double cum = 0.0;
  sample.action = logp.size() - 1;
  for (std::size_t i = 0; i < logp.size(); ++i) {
    cum += std::exp(logp[i]);
    if (u < cum) {
      sample.action = i;
      break;
    }
  }
  sample.log_prob = logp[sample.action];
  return sample;
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax: empty input");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

}  // namespace adamrel::nn
