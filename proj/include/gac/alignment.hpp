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

// Data-driven GPU alignment rules: GEMM kernel tiers, FlashAttention-2 head
// dimension templates, SDPA backend dispatch and the Tensor Core / L2 sector
// multiples. The defaults describe an A100 (sm80, FP16); other targets load a
// constraint file with the same fields.

#ifndef GAC_ALIGNMENT_HPP
#define GAC_ALIGNMENT_HPP

#include <cstdint>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "gac/io.hpp"

namespace gac {

// Matches d when d % modulus == remainder.
struct GemmTierRule {
  std::int64_t modulus = 1;
  std::int64_t remainder = 0;
  int tier = 3;
  std::string kernel;
  std::string mma;

  bool matches(std::int64_t d) const { return d % modulus == remainder; }

  friend bool operator==(const GemmTierRule&, const GemmTierRule&) = default;
};

struct Fa2Template {
  std::int64_t upper = 0;  // template t: serves head dims in (prev upper, t]
  std::int64_t tile_rows = 0;
  std::int64_t tile_cols = 0;

  friend bool operator==(const Fa2Template&, const Fa2Template&) = default;
};

struct TierLabel {
  int tier = 1;
  std::string kernel;
  std::string mma;

  friend bool operator==(const TierLabel&, const TierLabel&) = default;
};

enum class SdpaBackend { kFlash, kMath };

inline std::string_view to_string(SdpaBackend b) {
  return b == SdpaBackend::kFlash ? "flash" : "math";
}

struct ConstraintModel {
  std::int64_t min_multiple = 8;
  std::vector<GemmTierRule> gemm_tiers;  // first match wins
  std::vector<Fa2Template> fa2_templates;
  std::int64_t sdpa_flash_divisor = 8;
  std::int64_t tc_k_multiple = 16;
  std::int64_t tc_n_multiple = 8;
  std::int64_t l2_k_multiple = 16;

  std::int64_t max_head_dim() const {
    return fa2_templates.empty() ? 0 : fa2_templates.back().upper;
  }

  friend bool operator==(const ConstraintModel&,
                         const ConstraintModel&) = default;
};

inline void validate(const ConstraintModel& cm) {
  auto bad = [](const std::string& why) {
    fail(ErrorKind::kValidation, "constraint model: " + why);
  };
  if (cm.min_multiple < 1) bad("min_multiple must be >= 1");
  if (cm.sdpa_flash_divisor < 1) bad("sdpa_flash_divisor must be >= 1");
  if (cm.tc_k_multiple < 1 || cm.tc_n_multiple < 1 || cm.l2_k_multiple < 1) {
    bad("tensor-core and L2 multiples must be >= 1");
  }
  if (cm.gemm_tiers.empty()) bad("at least one GEMM tier is required");
  std::int64_t period = 1;
  for (const auto& r : cm.gemm_tiers) {
    if (r.modulus < 1) bad("GEMM tier modulus must be >= 1");
    if (r.remainder < 0 || r.remainder >= r.modulus) {
      bad("GEMM tier remainder must be in [0, modulus)");
    }
    if (r.tier < 1 || r.tier > 3) bad("GEMM tier must be 1, 2 or 3");
    period = std::lcm(period, r.modulus);
  }
  // Predicates are periodic in `period`, so one period decides exhaustiveness.
  for (std::int64_t d = 1; d <= period; ++d) {
    bool any = false;
    for (const auto& r : cm.gemm_tiers) any = any || r.matches(d);
    if (!any) bad("GEMM tiers do not cover d = " + std::to_string(d));
  }
  std::int64_t prev = 0;
  for (const auto& t : cm.fa2_templates) {
    if (t.upper <= prev) bad("FA2 template uppers must be strictly increasing");
    if (t.tile_rows < 1 || t.tile_cols < 1) bad("FA2 tiles must be positive");
    prev = t.upper;
  }
  if (cm.fa2_templates.empty()) bad("at least one FA2 template is required");
}

// A100 values: cuBLAS tiers, FA2 templates 64..256, SDPA flash when d % 8 == 0,
// mma.m16n8k16 (K % 16, N % 8) and 32-byte L2 sectors (K % 16 for FP16).
inline ConstraintModel default_constraints() {
  ConstraintModel cm;
  cm.gemm_tiers = {
      {8, 0, 1, "cuBLAS-native sm80", "mma.m16n8k16"},
      {2, 0, 2, "CUTLASS sm80 align2", "mma.m16n8k16"},
      {1, 0, 3, "CUTLASS sm75 align1", "mma.m16n8k8"},
  };
  cm.fa2_templates = {
      {64, 128, 128}, {96, 128, 64},  {128, 128, 64}, {160, 128, 32},
      {192, 128, 32}, {224, 128, 32}, {256, 128, 32},
  };
  return cm;
}

// d = 0 means the weight was removed; no kernel runs, so it counts as aligned.
inline bool is_aligned(std::int64_t d, const ConstraintModel& cm) {
  return d % cm.min_multiple == 0;
}

inline TierLabel classify_gemm(std::int64_t d, const ConstraintModel& cm) {
  if (d < 1) fail(ErrorKind::kInvalidArgument, "GEMM dimension must be >= 1");
  for (const auto& r : cm.gemm_tiers) {
    if (r.matches(d)) return {r.tier, r.kernel, r.mma};
  }
  fail(ErrorKind::kValidation,
       "no GEMM tier matches d = " + std::to_string(d));
}

// Smallest template whose upper bound is >= d.
inline const Fa2Template& fa2_template(std::int64_t d,
                                       const ConstraintModel& cm) {
  if (d < 1) fail(ErrorKind::kInvalidArgument, "head dimension must be >= 1");
  for (const auto& t : cm.fa2_templates) {
    if (t.upper >= d) return t;
  }
  fail(ErrorKind::kUnsupported,
       "unsupported head dimension " + std::to_string(d) + " (max " +
           std::to_string(cm.max_head_dim()) + ")");
}

inline SdpaBackend sdpa_backend(std::int64_t d, const ConstraintModel& cm) {
  if (d < 1) fail(ErrorKind::kInvalidArgument, "head dimension must be >= 1");
  return d % cm.sdpa_flash_divisor == 0 && d <= cm.max_head_dim()
             ? SdpaBackend::kFlash
             : SdpaBackend::kMath;
}

// Period after which every GEMM-side rule (tiers, Tensor Core, L2) repeats.
inline std::int64_t gemm_period(const ConstraintModel& cm) {
  std::int64_t p = cm.min_multiple;
  for (const auto& r : cm.gemm_tiers) p = std::lcm(p, r.modulus);
  p = std::lcm(p, cm.tc_k_multiple);
  p = std::lcm(p, cm.tc_n_multiple);
  return std::lcm(p, cm.l2_k_multiple);
}

inline Json to_json(const ConstraintModel& cm) {
  Json tiers = Json::array();
  for (const auto& r : cm.gemm_tiers) {
    tiers.push_back({{"modulus", r.modulus},
                     {"remainder", r.remainder},
                     {"tier", r.tier},
                     {"kernel", r.kernel},
                     {"mma", r.mma}});
  }
  Json templates = Json::array();
  for (const auto& t : cm.fa2_templates) {
    templates.push_back({{"upper", t.upper},
                         {"tile_rows", t.tile_rows},
                         {"tile_cols", t.tile_cols}});
  }
  return {{"format_version", std::string(kFormatVersion)},
          {"min_multiple", cm.min_multiple},
          {"gemm_tiers", std::move(tiers)},
          {"fa2_templates", std::move(templates)},
          {"sdpa_flash_rule", cm.sdpa_flash_divisor},
          {"tc_rule", {{"k_multiple", cm.tc_k_multiple},
                       {"n_multiple", cm.tc_n_multiple}}},
          {"l2_rule", {{"k_multiple", cm.l2_k_multiple}}}};
}

// Fields absent from the file keep their A100 defaults.
inline ConstraintModel constraints_from_json(const Json& j) {
  json_field::check_version(j, "constraint file");
  ConstraintModel cm = default_constraints();
  const char* ctx = "constraint file";
  if (j.contains("min_multiple")) {
    cm.min_multiple = json_field::integer(j, "min_multiple", ctx);
  }
  if (j.contains("gemm_tiers")) {
    cm.gemm_tiers.clear();
    for (const auto& r : j.at("gemm_tiers")) {
      GemmTierRule rule;
      rule.modulus = json_field::integer(r, "modulus", "gemm tier");
      rule.remainder = json_field::integer(r, "remainder", "gemm tier");
      rule.tier = static_cast<int>(json_field::integer(r, "tier", "gemm tier"));
      rule.kernel = r.value("kernel", "");
      rule.mma = r.value("mma", "");
      cm.gemm_tiers.push_back(std::move(rule));
    }
  }
  if (j.contains("fa2_templates")) {
    cm.fa2_templates.clear();
    for (const auto& t : j.at("fa2_templates")) {
      cm.fa2_templates.push_back(
          {json_field::integer(t, "upper", "fa2 template"),
           json_field::integer(t, "tile_rows", "fa2 template"),
           json_field::integer(t, "tile_cols", "fa2 template")});
    }
  }
  if (j.contains("sdpa_flash_rule")) {
    cm.sdpa_flash_divisor = json_field::integer(j, "sdpa_flash_rule", ctx);
  }
  if (j.contains("tc_rule")) {
    const Json& tc = j.at("tc_rule");
    if (tc.contains("k_multiple")) cm.tc_k_multiple = json_field::integer(tc, "k_multiple", "tc_rule");
    if (tc.contains("n_multiple")) cm.tc_n_multiple = json_field::integer(tc, "n_multiple", "tc_rule");
  }
  if (j.contains("l2_rule")) {
    cm.l2_k_multiple = json_field::integer(j.at("l2_rule"), "k_multiple", "l2_rule");
  }
  validate(cm);
  return cm;
}

inline ConstraintModel load_constraints(const std::filesystem::path& path) {
  return constraints_from_json(read_json(path));
}

}  // namespace gac

#endif  // GAC_ALIGNMENT_HPP
