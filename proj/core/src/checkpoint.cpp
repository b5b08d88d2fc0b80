// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "adamrel/checkpoint.hpp"

#include <stdexcept>
#include <string>

#include "adamrel/io.hpp"

namespace adamrel {

namespace {

constexpr int kVersion = 1;

std::string next_token(std::istream& in, const char* what) {
  std::string token;
  if (!(in >> token))
    throw std::invalid_argument(std::string("checkpoint: truncated while reading ") + what);
  return token;
}

void expect(std::istream& in, const std::string& word) {
  const auto token = next_token(in, word.c_str());
  if (token != word)
    throw std::invalid_argument("checkpoint: expected '" + word + "', found '" + token + "'");
}

std::uint64_t read_count(std::istream& in, const char* what) {
  const auto token = next_token(in, what);
  const auto v = io::parse_int(token);
  if (!v || *v < 0)
    throw std::invalid_argument(std::string("checkpoint: bad ") + what + " '" + token + "'");
  return static_cast<std::uint64_t>(*v);
}

double read_double(std::istream& in, const char* what) {
  const auto token = next_token(in, what);
  const auto v = io::parse_double(token);
  if (!v) throw std::invalid_argument(std::string("checkpoint: bad ") + what + " '" + token + "'");
  return *v;
}

}  // namespace

void save_checkpoint(std::ostream& out, const Checkpoint& checkpoint) {
  const auto& p = checkpoint.params;
  const auto& s = checkpoint.optimizer;
  if (s.m.size() != p.values.size() || s.v.size() != p.values.size())
    throw std::invalid_argument("checkpoint: optimizer state does not match parameters");
  out << "adamrel-checkpoint " << kVersion << '\n';
  out << "layers " << p.layout.size() << '\n';
  for (const auto& l : p.layout)
    out << l.fan_in << ' ' << l.fan_out << ' ' << l.weight_offset << ' ' << l.bias_offset << '\n';
  out << "params " << p.values.size() << '\n';
  for (double x : p.values) out << io::format_double(x) << '\n';
  out << "optimizer " << s.m.size() << ' ' << s.t_local << ' ' << s.steps_total << '\n';
  for (std::size_t i = 0; i < s.m.size(); ++i)
    out << io::format_double(s.m[i]) << ' ' << io::format_double(s.v[i]) << '\n';
  out << "end\n";
}

Checkpoint load_checkpoint(std::istream& in) {
  expect(in, "adamrel-checkpoint");
  const auto version = read_count(in, "version");
  if (version != kVersion)
    throw std::invalid_argument("checkpoint: unsupported version " + std::to_string(version));

  Checkpoint cp;
  expect(in, "layers");
  const auto layers = read_count(in, "layer count");
  for (std::uint64_t i = 0; i < layers; ++i) {
    nn::LayerLayout l;
    l.fan_in = read_count(in, "fan_in");
    l.fan_out = read_count(in, "fan_out");
    l.weight_offset = read_count(in, "weight_offset");
    l.bias_offset = read_count(in, "bias_offset");
    cp.params.layout.push_back(l);
  }
  expect(in, "params");
  const auto n = read_count(in, "parameter count");
  cp.params.values.resize(n);
  for (auto& x : cp.params.values) x = read_double(in, "parameter");

  expect(in, "optimizer");
  const auto m = read_count(in, "moment count");
  if (m != n) throw std::invalid_argument("checkpoint: moment count does not match parameters");
  cp.optimizer.t_local = read_count(in, "t_local");
  cp.optimizer.steps_total = read_count(in, "steps_total");
  cp.optimizer.m.resize(m);
  cp.optimizer.v.resize(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    cp.optimizer.m[i] = read_double(in, "m");
    cp.optimizer.v[i] = read_double(in, "v");
  }
  expect(in, "end");
  return cp;
}

}  // namespace adamrel
