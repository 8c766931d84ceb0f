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

// Per-weight importance scores. Magnitude (Frobenius norm) and Fisher (trace
// of the diagonal) are computed here; activation and gradient proxies need a
// forward/backward pass over calibration data and are ingested precomputed.
//
// Score file: {format_version?, proxy, scores: {weight_id: real, ...}}
// Dense matrix file: uint32 rows, uint32 cols (little-endian), the 4-byte
// dtype tag "f32\0", then rows*cols little-endian float32 values row-major.

#ifndef GAC_IMPORTANCE_HPP
#define GAC_IMPORTANCE_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gac/io.hpp"
#include "gac/model.hpp"

namespace gac {

enum class Proxy { kMagnitude, kActivation, kGradient, kFisher, kExternal };

inline std::string_view to_string(Proxy p) {
  switch (p) {
    case Proxy::kMagnitude: return "magnitude";
    case Proxy::kActivation: return "activation";
    case Proxy::kGradient: return "gradient";
    case Proxy::kFisher: return "fisher";
    case Proxy::kExternal: return "external";
  }
  return "external";
}

inline std::optional<Proxy> parse_proxy(std::string_view s) {
  for (Proxy p : {Proxy::kMagnitude, Proxy::kActivation, Proxy::kGradient,
                  Proxy::kFisher, Proxy::kExternal}) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

struct ScoreSet {
  std::map<std::string, double> scores;
  Proxy proxy = Proxy::kExternal;

  double at(const std::string& id) const {
    auto it = scores.find(id);
    if (it == scores.end()) {
      fail(ErrorKind::kValidation, "no score for weight '" + id + "'");
    }
    return it->second;
  }

  friend bool operator==(const ScoreSet&, const ScoreSet&) = default;
};

// Checks that the keys are exactly the weight ids of `spec` and every score is
// finite and non-negative.
inline void bind(const ScoreSet& s, const ModelSpec& spec) {
  for (const auto& [id, v] : s.scores) {
    if (!spec.find(id)) {
      fail(ErrorKind::kValidation, "score for unknown weight id '" + id + "'");
    }
    if (!std::isfinite(v)) {
      fail(ErrorKind::kValidation, "score for '" + id + "' is not finite");
    }
    if (v < 0) {
      fail(ErrorKind::kValidation, "negative score " + std::to_string(v) +
                                       " for weight '" + id + "'");
    }
  }
  for (const auto& w : spec.weights) {
    if (!s.scores.contains(w.id)) {
      fail(ErrorKind::kValidation, "missing score for weight id '" + w.id + "'");
    }
  }
}

inline std::vector<double> scores_in_spec_order(const ScoreSet& s,
                                                const ModelSpec& spec) {
  std::vector<double> out;
  out.reserve(spec.size());
  for (const auto& w : spec.weights) out.push_back(s.at(w.id));
  return out;
}

struct DenseMatrix {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<float> values;  // row-major
};

inline double magnitude_score(std::span<const float> values) {
  if (values.empty()) {
    fail(ErrorKind::kInvalidArgument, "magnitude score of an empty matrix");
  }
  long double sum = 0;
  for (float v : values) {
    if (!std::isfinite(v)) {
      fail(ErrorKind::kInvalidArgument, "matrix contains NaN or Inf");
    }
    sum += static_cast<long double>(v) * v;
  }
  return static_cast<double>(std::sqrt(sum));
}

// ||W||_F
inline double magnitude_score(const DenseMatrix& m) {
  if (static_cast<std::int64_t>(m.values.size()) != m.rows * m.cols) {
    fail(ErrorKind::kInvalidArgument, "matrix payload does not match its shape");
  }
  return magnitude_score(std::span<const float>(m.values));
}

// tr(F) from the Fisher diagonal.
inline double fisher_score(std::span<const double> fisher_diag) {
  long double sum = 0;
  for (std::size_t i = 0; i < fisher_diag.size(); ++i) {
    const double v = fisher_diag[i];
    if (!std::isfinite(v)) {
      fail(ErrorKind::kInvalidArgument,
           "Fisher diagonal entry " + std::to_string(i) + " is not finite");
    }
    if (v < 0) {
      fail(ErrorKind::kInvalidArgument,
           "Fisher diagonal entry " + std::to_string(i) + " is negative");
    }
    sum += v;
  }
  return static_cast<double>(sum);
}

namespace detail {

inline std::uint32_t load_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void store_u32_le(std::uint32_t v, std::string& out) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline constexpr char kF32Tag[4] = {'f', '3', '2', '\0'};
inline constexpr std::size_t kMatrixHeaderBytes = 12;

}  // namespace detail

inline DenseMatrix decode_matrix(std::string_view bytes) {
  if (bytes.size() < detail::kMatrixHeaderBytes) {
    fail(ErrorKind::kParse, "matrix file shorter than its header");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  DenseMatrix m;
  m.rows = detail::load_u32_le(p);
  m.cols = detail::load_u32_le(p + 4);
  if (std::memcmp(p + 8, detail::kF32Tag, 4) != 0) {
    fail(ErrorKind::kParse, "matrix dtype must be f32");
  }
  const std::size_t count = static_cast<std::size_t>(m.rows * m.cols);
  if (bytes.size() != detail::kMatrixHeaderBytes + 4 * count) {
    fail(ErrorKind::kParse, "matrix payload size does not match " +
                                std::to_string(m.rows) + "x" +
                                std::to_string(m.cols));
  }
  m.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t bits =
        detail::load_u32_le(p + detail::kMatrixHeaderBytes + 4 * i);
    m.values[i] = std::bit_cast<float>(bits);
  }
  return m;
}

inline std::string encode_matrix(const DenseMatrix& m) {
  std::string out;
  out.reserve(detail::kMatrixHeaderBytes + 4 * m.values.size());
  detail::store_u32_le(static_cast<std::uint32_t>(m.rows), out);
  detail::store_u32_le(static_cast<std::uint32_t>(m.cols), out);
  out.append(detail::kF32Tag, 4);
  for (float v : m.values) detail::store_u32_le(std::bit_cast<std::uint32_t>(v), out);
  return out;
}

inline DenseMatrix load_matrix(const std::filesystem::path& path) {
  return decode_matrix(read_file(path));
}

inline Json to_json(const ScoreSet& s) {
  return {{"format_version", std::string(kFormatVersion)},
          {"proxy", std::string(to_string(s.proxy))},
          {"scores", s.scores}};
}

inline ScoreSet scores_from_json(const Json& j, const ModelSpec& spec) {
  json_field::check_version(j, "score file");
  ScoreSet s;
  const std::string proxy = json_field::string(j, "proxy", "score file");
  auto parsed = parse_proxy(proxy);
  if (!parsed) fail(ErrorKind::kParse, "score file: unknown proxy '" + proxy + "'");
  s.proxy = *parsed;
  const Json& scores = json_field::require(j, "scores", "score file");
  if (!scores.is_object()) {
    fail(ErrorKind::kParse, "score file: 'scores' must be an object");
  }
  for (const auto& [id, v] : scores.items()) {
    if (!v.is_number()) {
      fail(ErrorKind::kParse, "score file: score for '" + id + "' must be a number");
    }
    s.scores[id] = v.get<double>();
  }
  bind(s, spec);
  return s;
}

inline ScoreSet load_scores(const std::filesystem::path& path,
                            const ModelSpec& spec) {
  return scores_from_json(read_json(path), spec);
}

inline void save_scores(const std::filesystem::path& path, const ScoreSet& s) {
  write_json_atomic(path, to_json(s));
}

}  // namespace gac

#endif  // GAC_IMPORTANCE_HPP
