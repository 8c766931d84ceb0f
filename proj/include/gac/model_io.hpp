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

// Model-spec and allocation file formats.
//
//   model:      {format_version, name, weights: [{id, layer, role, rows,
//                cols?, d_full, d_min?, axis, factor_count}], metadata?}
//   allocation: {format_version, model, kind, entries: [{weight_id, d, d_int,
//                params}], total_params}

#ifndef GAC_MODEL_IO_HPP
#define GAC_MODEL_IO_HPP

#include <filesystem>
#include <string>

#include "gac/io.hpp"
#include "gac/model.hpp"

namespace gac {

inline Json to_json(const WeightSpec& w) {
  Json j = {{"id", w.id},
            {"layer", w.layer},
            {"role", std::string(to_string(w.role))},
            {"rows", w.rows}};
  if (w.cols) j["cols"] = *w.cols;
  j["d_full"] = w.d_full;
  j["d_min"] = w.d_min;
  j["axis"] = std::string(to_string(w.axis));
  j["factor_count"] = w.factor_count;
  return j;
}

inline Json to_json(const ModelSpec& spec) {
  Json weights = Json::array();
  for (const auto& w : spec.weights) weights.push_back(to_json(w));
  Json j = {{"format_version", std::string(kFormatVersion)},
            {"name", spec.name},
            {"weights", std::move(weights)}};
  if (!spec.metadata.empty()) j["metadata"] = spec.metadata;
  return j;
}

inline WeightSpec weight_from_json(const Json& j, std::size_t index) {
  std::string ctx = "weight #" + std::to_string(index);
  WeightSpec w;
  w.id = json_field::string(j, "id", ctx);
  ctx = "weight '" + w.id + "'";
  w.layer = static_cast<int>(json_field::integer(j, "layer", ctx));
  const std::string role = json_field::string(j, "role", ctx);
  auto parsed_role = parse_role(role);
  if (!parsed_role) fail(ErrorKind::kParse, ctx + ": unknown role '" + role + "'");
  w.role = *parsed_role;
  w.rows = json_field::integer(j, "rows", ctx);
  if (j.contains("cols") && !j.at("cols").is_null()) {
    w.cols = json_field::integer(j, "cols", ctx);
  }
  w.d_full = json_field::integer(j, "d_full", ctx);
  if (j.contains("d_min")) w.d_min = json_field::integer(j, "d_min", ctx);
  const std::string axis = json_field::string(j, "axis", ctx);
  auto parsed_axis = parse_axis(axis);
  if (!parsed_axis) fail(ErrorKind::kParse, ctx + ": unknown axis '" + axis + "'");
  w.axis = *parsed_axis;
  w.factor_count = static_cast<int>(json_field::integer(j, "factor_count", ctx));
  return w;
}

inline ModelSpec model_from_json(const Json& j) {
  json_field::check_version(j, "model spec");
  ModelSpec spec;
  spec.name = json_field::string(j, "name", "model spec");
  const Json& weights = json_field::require(j, "weights", "model spec");
  if (!weights.is_array()) {
    fail(ErrorKind::kParse, "model spec: 'weights' must be an array");
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    spec.weights.push_back(weight_from_json(weights[i], i));
  }
  if (j.contains("metadata")) {
    const Json& meta = j.at("metadata");
    if (!meta.is_object()) {
      fail(ErrorKind::kParse, "model spec: 'metadata' must be an object");
    }
    for (const auto& [k, v] : meta.items()) {
      spec.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
  }
  validate(spec);
  return spec;
}

inline ModelSpec load_model_spec(const std::filesystem::path& path) {
  return model_from_json(read_json(path));
}

inline void save_model_spec(const std::filesystem::path& path,
                            const ModelSpec& spec) {
  write_json_atomic(path, to_json(spec));
}

inline Json to_json(const Allocation& a) {
  Json entries = Json::array();
  for (const auto& e : a.entries) {
    entries.push_back({{"weight_id", e.weight_id},
                       {"d", e.d},
                       {"d_int", e.d_int},
                       {"params", e.params}});
  }
  return {{"format_version", std::string(kFormatVersion)},
          {"model", a.model},
          {"kind", std::string(to_string(a.kind))},
          {"entries", std::move(entries)},
          {"total_params", a.total_params}};
}

inline Allocation allocation_from_json(const Json& j) {
  json_field::check_version(j, "allocation");
  Allocation a;
  a.model = json_field::string(j, "model", "allocation");
  const std::string kind = json_field::string(j, "kind", "allocation");
  auto parsed = parse_allocation_kind(kind);
  if (!parsed) fail(ErrorKind::kParse, "allocation: unknown kind '" + kind + "'");
  a.kind = *parsed;
  const Json& entries = json_field::require(j, "entries", "allocation");
  if (!entries.is_array()) {
    fail(ErrorKind::kParse, "allocation: 'entries' must be an array");
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    std::string ctx = "allocation entry #" + std::to_string(i);
    AllocationEntry e;
    e.weight_id = json_field::string(entries[i], "weight_id", ctx);
    ctx = "allocation entry '" + e.weight_id + "'";
    e.d = json_field::number(entries[i], "d", ctx);
    e.d_int = json_field::integer(entries[i], "d_int", ctx);
    e.params = json_field::integer(entries[i], "params", ctx);
    a.entries.push_back(std::move(e));
  }
  a.total_params = json_field::integer(j, "total_params", "allocation");
  validate(a);
  return a;
}

inline Allocation load_allocation(const std::filesystem::path& path) {
  return allocation_from_json(read_json(path));
}

inline void save_allocation(const std::filesystem::path& path,
                            const Allocation& a) {
  write_json_atomic(path, to_json(a));
}

}  // namespace gac

#endif  // GAC_MODEL_IO_HPP
