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

// Candidate generation: for each weight, a handful of aligned dimensions that
// bracket the unconstrained dimension d*, filtered against the latency oracle
// so that no candidate sits on the slow side of a performance cliff.
//
// Seeds for a = floor(d* / m) * m, m = min_multiple, step s (default m):
//   a - w*s, ..., a - s, a, a + s, ..., a + w*s      (w = window, default 1)
//   plus one boundary: the next FA2 template above d* for head-dim weights,
//   else the next multiple of the GEMM rule period above a + w*s.
// Seeds are snapped into the aligned part of [d_min, d_full].

#ifndef GAC_SWEEP_HPP
#define GAC_SWEEP_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gac/alignment.hpp"
#include "gac/cost_model.hpp"
#include "gac/importance.hpp"
#include "gac/io.hpp"
#include "gac/model.hpp"

namespace gac {

struct CandidateSet {
  std::string weight_id;
  double d_star = 0.0;
  std::vector<std::int64_t> candidates;  // ascending, distinct

  friend bool operator==(const CandidateSet&, const CandidateSet&) = default;
};

struct SweepConfig {
  int window = 1;
  std::int64_t step = 0;        // 0 means min_multiple
  bool add_boundary = true;
  bool full_range = false;      // every aligned d in [d_min, d_full] as a seed
  std::int64_t seq = 2048;      // M used for GEMM latency queries
};

namespace detail {

inline std::int64_t floor_to(std::int64_t v, std::int64_t m) {
  return (v >= 0 ? v / m : -((-v + m - 1) / m)) * m;
}

inline std::int64_t ceil_to(std::int64_t v, std::int64_t m) {
  return -floor_to(-v, m);
}

inline std::optional<std::int64_t> boundary_seed(const WeightSpec& w,
                                                 double d_star,
                                                 std::int64_t top_seed,
                                                 const ConstraintModel& cm) {
  if (w.is_head_dim()) {
    for (const auto& t : cm.fa2_templates) {
      if (static_cast<double>(t.upper) > d_star) {
        return ceil_to(t.upper, cm.min_multiple);
      }
    }
    return std::nullopt;
  }
  const std::int64_t period = gemm_period(cm);
  return floor_to(top_seed, period) + period;
}

inline double candidate_latency(const WeightSpec& w, std::int64_t d,
                                const CostOracle& oracle, std::int64_t seq) {
  return d == 0 ? 0.0 : weight_latency(w, d, seq, oracle);
}

}  // namespace detail

// Drops every candidate for which some strictly larger candidate is strictly
// faster. Ties keep both, so the survivors' latency is non-decreasing in d.
inline std::vector<std::int64_t> cliff_filter(
    const WeightSpec& w, const std::vector<std::int64_t>& sorted_seeds,
    const CostOracle& oracle, std::int64_t seq) {
  std::vector<double> lat;
  lat.reserve(sorted_seeds.size());
  for (auto d : sorted_seeds) lat.push_back(detail::candidate_latency(w, d, oracle, seq));
  std::vector<std::int64_t> kept;
  double suffix_min = std::numeric_limits<double>::infinity();
  std::vector<bool> keep(sorted_seeds.size());
  for (std::size_t i = sorted_seeds.size(); i-- > 0;) {
    keep[i] = !(suffix_min < lat[i]);
    suffix_min = std::min(suffix_min, lat[i]);
  }
  for (std::size_t i = 0; i < sorted_seeds.size(); ++i) {
    if (keep[i]) kept.push_back(sorted_seeds[i]);
  }
  return kept;
}

// `removable` admits d = 0 (requires d_min == 0); callers set it when the
// weight's importance score is zero.
inline CandidateSet candidates_for(const WeightSpec& w, double d_star,
                                   const ConstraintModel& cm,
                                   const CostOracle& oracle,
                                   const SweepConfig& config = {},
                                   bool removable = false) {
  if (!(d_star >= static_cast<double>(w.d_min) - 1e-9 &&
        d_star <= static_cast<double>(w.d_full) + 1e-9)) {
    fail(ErrorKind::kInvalidArgument,
         "weight '" + w.id + "': d* = " + std::to_string(d_star) +
             " outside [d_min, d_full]");
  }
  const std::int64_t m = cm.min_multiple;
  const std::int64_t step = config.step == 0 ? m : config.step;
  if (step < 1 || step % m != 0) {
    fail(ErrorKind::kInvalidArgument,
         "sweep step must be a positive multiple of " + std::to_string(m));
  }
  if (config.window < 0) fail(ErrorKind::kInvalidArgument, "sweep window must be >= 0");

  const std::int64_t lo = detail::ceil_to(std::max<std::int64_t>(w.d_min, 1), m);
  const std::int64_t hi = detail::floor_to(w.d_full, m);

  std::set<std::int64_t> seeds;
  const bool zero_ok = removable && w.d_min == 0;
  if (zero_ok) seeds.insert(0);
  if (lo <= hi) {
    auto add = [&](std::int64_t s) { seeds.insert(std::clamp(s, lo, hi)); };
    if (config.full_range) {
      for (std::int64_t s = lo; s <= hi; s += m) seeds.insert(s);
    } else {
      const auto a = detail::floor_to(static_cast<std::int64_t>(std::floor(d_star)), m);
      for (int k = -config.window; k <= config.window; ++k) add(a + k * step);
      if (config.add_boundary) {
        if (auto b = detail::boundary_seed(w, d_star, a + config.window * step, cm)) {
          add(*b);
        }
      }
    }
  }
  if (seeds.empty()) {
    throw InfeasibleError("weight '" + w.id + "': no aligned dimension in [" +
                              std::to_string(w.d_min) + ", " +
                              std::to_string(w.d_full) + "]",
                          0);
  }
  CandidateSet out;
  out.weight_id = w.id;
  out.d_star = d_star;
  out.candidates = cliff_filter(w, {seeds.begin(), seeds.end()}, oracle, config.seq);
  return out;
}

// One candidate set per weight of `spec`, in spec order.
inline std::vector<CandidateSet> sweep_all(const ModelSpec& spec,
                                           const Allocation& baseline,
                                           const ConstraintModel& cm,
                                           const CostOracle& oracle,
                                           const SweepConfig& config = {},
                                           const ScoreSet* scores = nullptr) {
  if (baseline.kind != AllocationKind::kMisalignedBaseline) {
    fail(ErrorKind::kInvalidArgument,
         "sweep expects a misaligned_baseline allocation");
  }
  const auto entries = entries_in_spec_order(spec, baseline);
  std::vector<CandidateSet> sets;
  sets.reserve(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto& w = spec.weights[i];
    const bool removable = scores && scores->at(w.id) == 0.0;
    sets.push_back(candidates_for(w, entries[i]->d, cm, oracle, config, removable));
  }
  return sets;
}

inline Json to_json(const std::vector<CandidateSet>& sets) {
  Json arr = Json::array();
  for (const auto& s : sets) {
    arr.push_back({{"weight_id", s.weight_id},
                   {"d_star", s.d_star},
                   {"candidates", s.candidates}});
  }
  return {{"format_version", std::string(kFormatVersion)}, {"sets", std::move(arr)}};
}

inline std::vector<CandidateSet> candidates_from_json(const Json& j) {
  json_field::check_version(j, "candidate file");
  const Json& arr = json_field::require(j, "sets", "candidate file");
  if (!arr.is_array()) fail(ErrorKind::kParse, "candidate file: 'sets' must be an array");
  std::vector<CandidateSet> sets;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string ctx = "candidate set #" + std::to_string(i);
    CandidateSet s;
    s.weight_id = json_field::string(arr[i], "weight_id", ctx);
    s.d_star = json_field::number(arr[i], "d_star", ctx);
    for (const auto& c : json_field::require(arr[i], "candidates", ctx)) {
      if (!c.is_number_integer()) fail(ErrorKind::kParse, ctx + ": candidates must be integers");
      s.candidates.push_back(c.get<std::int64_t>());
    }
    if (!std::is_sorted(s.candidates.begin(), s.candidates.end()) ||
        std::adjacent_find(s.candidates.begin(), s.candidates.end()) !=
            s.candidates.end()) {
      fail(ErrorKind::kValidation,
           "candidate set '" + s.weight_id + "' must be ascending and distinct");
    }
    sets.push_back(std::move(s));
  }
  return sets;
}

inline std::vector<CandidateSet> load_candidates(const std::filesystem::path& path) {
  return candidates_from_json(read_json(path));
}

inline void save_candidates(const std::filesystem::path& path,
                            const std::vector<CandidateSet>& sets) {
  write_json_atomic(path, to_json(sets));
}

}  // namespace gac

#endif  // GAC_SWEEP_HPP
