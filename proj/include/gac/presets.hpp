// Copyright 2026 The GAC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Built-in model templates and a reproducible synthetic score generator.

#ifndef GAC_PRESETS_HPP
#define GAC_PRESETS_HPP

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "gac/importance.hpp"
#include "gac/model.hpp"

namespace gac {

namespace detail {

inline std::int64_t break_even_rank(std::int64_t rows, std::int64_t cols) {
  // Largest multiple of 16 whose factorization is no larger than the dense
  // matrix: d * (rows + cols) <= rows * cols.
  return (rows * cols / (rows + cols)) / 16 * 16;
}

}  // namespace detail

// Llama-3-8B projections compressed by low-rank factorization: 32 layers x
// {q, k, v, o, gate, up, down} = 224 weights. rows are output features, cols
// input features (hidden 4096, intermediate 14336, 8 KV heads of 128).
inline ModelSpec llama3_8b_spec() {
  struct Shape {
    Role role;
    std::int64_t rows;
    std::int64_t cols;
  };
  constexpr Shape kShapes[] = {
      {Role::kQProj, 4096, 4096},  {Role::kKProj, 1024, 4096},
      {Role::kVProj, 1024, 4096},  {Role::kOProj, 4096, 4096},
      {Role::kGate, 14336, 4096},  {Role::kUp, 14336, 4096},
      {Role::kDown, 4096, 14336},
  };
  ModelSpec spec;
  spec.name = "llama3-8b";
  spec.metadata = {{"compression", "low-rank factorization"},
                   {"layers", "32"},
                   {"source", "built-in preset"}};
  for (int layer = 0; layer < 32; ++layer) {
    for (const auto& s : kShapes) {
      WeightSpec w;
      w.id = "layers." + std::to_string(layer) + "." + std::string(to_string(s.role));
      w.layer = layer;
      w.role = s.role;
      w.rows = s.rows;
      w.cols = s.cols;
      w.d_full = detail::break_even_rank(s.rows, s.cols);
      w.d_min = 0;
      w.axis = Axis::kInner;
      w.factor_count = 2;
      spec.weights.push_back(std::move(w));
    }
  }
  return spec;
}

// n pruning weights of rows x d_full (default 100 x 1024 x 1024).
inline ModelSpec uniform_pruning_spec(int n = 100, std::int64_t rows = 1024,
                                      std::int64_t d_full = 1024) {
  ModelSpec spec;
  spec.name = "uniform" + std::to_string(n);
  for (int i = 0; i < n; ++i) {
    WeightSpec w;
    w.id = "w" + std::to_string(i);
    w.layer = i;
    w.role = Role::kOther;
    w.rows = rows;
    w.d_full = d_full;
    w.axis = Axis::kInner;
    w.factor_count = 1;
    spec.weights.push_back(std::move(w));
  }
  return spec;
}

inline std::vector<std::string_view> preset_names() {
  return {"llama3-8b", "uniform100"};
}

inline ModelSpec preset_spec(std::string_view name) {
  if (name == "llama3-8b") return llama3_8b_spec();
  if (name == "uniform100") return uniform_pruning_spec();
  fail(ErrorKind::kInvalidArgument, "unknown preset '" + std::string(name) + "'");
}

// Uniform double in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementation.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// s_i = d_full_i * U(lo, hi): scores proportional to each weight's extent with
// continuous jitter, so that proportional allocation lands on generic
// (irregular) dimensions.
inline ScoreSet synthetic_scores(const ModelSpec& spec, std::uint64_t seed,
                                 double lo = 0.8, double hi = 1.2,
                                 Proxy proxy = Proxy::kFisher) {
  std::mt19937_64 rng(seed);
  ScoreSet s;
  s.proxy = proxy;
  for (const auto& w : spec.weights) {
    s.scores[w.id] =
        static_cast<double>(w.d_full) * (lo + (hi - lo) * unit_uniform(rng));
  }
  return s;
}

}  // namespace gac

#endif  // GAC_PRESETS_HPP
