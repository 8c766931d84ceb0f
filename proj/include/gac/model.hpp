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

// Data model for compressible weights, parameter budgets and dimension
// allocations.
//
// A WeightSpec describes one matrix whose compressible dimension `d` is to be
// chosen. Parameter counts are linear in `d`:
//
//   factor_count == 1 (pruning):       params(d) = rows * d
//   factor_count == 2 (factorization): params(d) = d * (rows + cols)

#ifndef GAC_MODEL_HPP
#define GAC_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gac/error.hpp"

namespace gac {

enum class Role { kQProj, kKProj, kVProj, kOProj, kGate, kUp, kDown, kOther };

// Which GEMM axis the compression reduces.
enum class Axis { kInner, kOutput, kSequence };

inline std::string_view to_string(Role role) {
  switch (role) {
    case Role::kQProj: return "q_proj";
    case Role::kKProj: return "k_proj";
    case Role::kVProj: return "v_proj";
    case Role::kOProj: return "o_proj";
    case Role::kGate: return "gate";
    case Role::kUp: return "up";
    case Role::kDown: return "down";
    case Role::kOther: return "other";
  }
  return "other";
}

inline std::optional<Role> parse_role(std::string_view s) {
  for (Role r : {Role::kQProj, Role::kKProj, Role::kVProj, Role::kOProj,
                 Role::kGate, Role::kUp, Role::kDown, Role::kOther}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

inline std::string_view to_string(Axis axis) {
  switch (axis) {
    case Axis::kInner: return "inner";
    case Axis::kOutput: return "output";
    case Axis::kSequence: return "sequence";
  }
  return "inner";
}

inline std::optional<Axis> parse_axis(std::string_view s) {
  for (Axis a : {Axis::kInner, Axis::kOutput, Axis::kSequence}) {
    if (to_string(a) == s) return a;
  }
  return std::nullopt;
}

struct WeightSpec {
  std::string id;
  int layer = 0;
  Role role = Role::kOther;
  std::int64_t rows = 1;
  std::optional<std::int64_t> cols;  // required when factor_count == 2
  std::int64_t d_full = 1;
  std::int64_t d_min = 0;
  Axis axis = Axis::kInner;
  int factor_count = 1;

  // Parameters added per unit of the compressible dimension.
  std::int64_t per_dim_cost() const {
    return factor_count == 2 ? rows + cols.value_or(0) : rows;
  }

  std::int64_t params(std::int64_t d) const { return per_dim_cost() * d; }
  double params(double d) const {
    return static_cast<double>(per_dim_cost()) * d;
  }

  std::int64_t full_params() const { return params(d_full); }

  // Weights whose reduced dimension is an attention head dimension; their
  // latency is governed by attention dispatch rather than GEMM tiers.
  bool is_head_dim() const {
    return axis == Axis::kOutput &&
           (role == Role::kQProj || role == Role::kKProj ||
            role == Role::kVProj);
  }

  friend bool operator==(const WeightSpec&, const WeightSpec&) = default;
};

struct ModelSpec {
  std::string name;
  std::vector<WeightSpec> weights;
  std::map<std::string, std::string> metadata;

  std::size_t size() const { return weights.size(); }

  const WeightSpec* find(std::string_view id) const {
    for (const auto& w : weights) {
      if (w.id == id) return &w;
    }
    return nullptr;
  }

  std::int64_t total_full_params() const {
    std::int64_t total = 0;
    for (const auto& w : weights) total += w.full_params();
    return total;
  }

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

// Throws kValidation naming the weight and field on the first violation.
inline void validate(const WeightSpec& w) {
  auto bad = [&](std::string_view field, const std::string& why) {
    fail(ErrorKind::kValidation,
         "weight '" + w.id + "' field '" + std::string(field) + "': " + why);
  };
  if (w.id.empty()) bad("id", "must be non-empty");
  if (w.rows < 1) bad("rows", "must be >= 1");
  if (w.d_full < 1) bad("d_full", "must be >= 1");
  if (w.d_min < 0) bad("d_min", "must be >= 0");
  if (w.d_min > w.d_full) {
    bad("d_min", "d_min " + std::to_string(w.d_min) + " exceeds d_full " +
                     std::to_string(w.d_full));
  }
  if (w.factor_count != 1 && w.factor_count != 2) {
    bad("factor_count", "must be 1 or 2");
  }
  if (w.factor_count == 2 && !w.cols) bad("cols", "required when factor_count = 2");
  if (w.cols && *w.cols < 1) bad("cols", "must be >= 1");
}

inline void validate(const ModelSpec& spec) {
  std::unordered_set<std::string> seen;
  for (const auto& w : spec.weights) {
    validate(w);
    if (!seen.insert(w.id).second) {
      fail(ErrorKind::kValidation, "duplicate weight id '" + w.id + "'");
    }
  }
}

struct Budget {
  double ratio = 0.0;
  std::int64_t total_full = 0;
  std::int64_t budget_params = 0;
};

// B = floor((1 - ratio) * |W|). Products that land within rounding noise of an
// integer are snapped so that e.g. 0.5 * 1000 is exactly 500.
inline Budget make_budget(const ModelSpec& spec, double ratio) {
  if (!(ratio >= 0.0 && ratio < 1.0)) {
    fail(ErrorKind::kInvalidArgument,
         "compression ratio must be in [0, 1), got " + std::to_string(ratio));
  }
  Budget b;
  b.ratio = ratio;
  b.total_full = spec.total_full_params();
  const long double exact =
      (1.0L - static_cast<long double>(ratio)) * b.total_full;
  const long double nearest = std::round(exact);
  const long double snapped =
      std::fabs(exact - nearest) <= 1e-6L * std::max(1.0L, exact) ? nearest
                                                                  : exact;
  b.budget_params =
      std::min(b.total_full, static_cast<std::int64_t>(std::floor(snapped)));
  return b;
}

enum class AllocationKind { kMisalignedBaseline, kAligned };

inline std::string_view to_string(AllocationKind k) {
  return k == AllocationKind::kAligned ? "aligned" : "misaligned_baseline";
}

inline std::optional<AllocationKind> parse_allocation_kind(std::string_view s) {
  if (s == "aligned") return AllocationKind::kAligned;
  if (s == "misaligned_baseline") return AllocationKind::kMisalignedBaseline;
  return std::nullopt;
}

struct AllocationEntry {
  std::string weight_id;
  double d = 0.0;            // fractional only in baseline allocations
  std::int64_t d_int = 0;    // materialized dimension
  std::int64_t params = 0;   // params(d_int)

  friend bool operator==(const AllocationEntry&,
                         const AllocationEntry&) = default;
};

struct Allocation {
  std::string model;
  AllocationKind kind = AllocationKind::kAligned;
  std::vector<AllocationEntry> entries;
  std::int64_t total_params = 0;

  const AllocationEntry* find(std::string_view id) const {
    for (const auto& e : entries) {
      if (e.weight_id == id) return &e;
    }
    return nullptr;
  }

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

// Round-half-up materialization of a fractional dimension.
inline std::int64_t materialize(double d) {
  return static_cast<std::int64_t>(std::floor(d + 0.5));
}

inline AllocationEntry make_entry(const WeightSpec& w, double d) {
  AllocationEntry e;
  e.weight_id = w.id;
  e.d = d;
  e.d_int = materialize(d);
  e.params = w.params(e.d_int);
  return e;
}

// Builds an allocation in spec order from one dimension per weight.
inline Allocation make_allocation(const ModelSpec& spec,
                                  const std::vector<double>& dims,
                                  AllocationKind kind) {
  if (dims.size() != spec.size()) {
    fail(ErrorKind::kInvalidArgument,
         "allocation needs one dimension per weight");
  }
  Allocation a;
  a.model = spec.name;
  a.kind = kind;
  a.entries.reserve(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) {
    a.entries.push_back(make_entry(spec.weights[i], dims[i]));
    a.total_params += a.entries.back().params;
  }
  return a;
}

// Every weight at its uncompressed dimension.
inline Allocation full_allocation(const ModelSpec& spec) {
  std::vector<double> dims;
  dims.reserve(spec.size());
  for (const auto& w : spec.weights) dims.push_back(static_cast<double>(w.d_full));
  return make_allocation(spec, dims, AllocationKind::kAligned);
}

inline void validate(const Allocation& alloc) {
  std::int64_t sum = 0;
  std::unordered_set<std::string> seen;
  for (const auto& e : alloc.entries) {
    if (!seen.insert(e.weight_id).second) {
      fail(ErrorKind::kValidation,
           "allocation lists weight '" + e.weight_id + "' twice");
    }
    if (e.d < 0 || e.d_int < 0) {
      fail(ErrorKind::kValidation,
           "allocation entry '" + e.weight_id + "' has a negative dimension");
    }
    if (alloc.kind == AllocationKind::kAligned &&
        e.d != static_cast<double>(e.d_int)) {
      fail(ErrorKind::kValidation, "aligned allocation entry '" + e.weight_id +
                                       "' has a fractional dimension");
    }
    sum += e.params;
  }
  if (sum != alloc.total_params) {
    fail(ErrorKind::kValidation,
         "allocation total_params " + std::to_string(alloc.total_params) +
             " does not equal the entry sum " + std::to_string(sum));
  }
}

// Sum of params(d_int) over the allocation. The allocation must cover exactly
// the weights of `spec`.
inline std::int64_t total_params(const ModelSpec& spec,
                                 const Allocation& alloc) {
  std::unordered_map<std::string_view, const AllocationEntry*> by_id;
  for (const auto& e : alloc.entries) {
    if (!spec.find(e.weight_id)) {
      fail(ErrorKind::kValidation,
           "allocation has extra weight id '" + e.weight_id + "'");
    }
    by_id.emplace(e.weight_id, &e);
  }
  std::int64_t total = 0;
  for (const auto& w : spec.weights) {
    auto it = by_id.find(w.id);
    if (it == by_id.end()) {
      fail(ErrorKind::kValidation,
           "allocation is missing weight id '" + w.id + "'");
    }
    total += w.params(it->second->d_int);
  }
  return total;
}

// Dimensions of `alloc` in spec order; throws on missing ids.
inline std::vector<const AllocationEntry*> entries_in_spec_order(
    const ModelSpec& spec, const Allocation& alloc) {
  std::vector<const AllocationEntry*> out;
  out.reserve(spec.size());
  for (const auto& w : spec.weights) {
    const AllocationEntry* e = alloc.find(w.id);
    if (!e) {
      fail(ErrorKind::kValidation,
           "allocation is missing weight id '" + w.id + "'");
    }
    out.push_back(e);
  }
  if (alloc.entries.size() != spec.size()) {
    for (const auto& e : alloc.entries) {
      if (!spec.find(e.weight_id)) {
        fail(ErrorKind::kValidation,
             "allocation has extra weight id '" + e.weight_id + "'");
      }
    }
  }
  return out;
}

}  // namespace gac

#endif  // GAC_MODEL_HPP
