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

#include "gac/alignment.hpp"

#include "gtest/gtest.h"
#include "test_util.hpp"

namespace gac {
namespace {

const ConstraintModel kA100 = default_constraints();

TEST(DefaultConstraintsTest, TierExamples) {
  EXPECT_EQ(classify_gemm(4096, kA100).tier, 1);
  EXPECT_EQ(classify_gemm(4094, kA100).tier, 2);
  EXPECT_EQ(classify_gemm(4093, kA100).tier, 3);
  EXPECT_EQ(classify_gemm(4096, kA100).kernel, "cuBLAS-native sm80");
  EXPECT_EQ(classify_gemm(4094, kA100).kernel, "CUTLASS sm80 align2");
  EXPECT_EQ(classify_gemm(4093, kA100).kernel, "CUTLASS sm75 align1");
  EXPECT_EQ(classify_gemm(4093, kA100).mma, "mma.m16n8k8");
  EXPECT_EQ(classify_gemm(4096, kA100).mma, "mma.m16n8k16");
}

TEST(DefaultConstraintsTest, Rules) {
  EXPECT_EQ(kA100.min_multiple, 8);
  EXPECT_EQ(kA100.sdpa_flash_divisor, 8);
  EXPECT_EQ(kA100.tc_k_multiple, 16);
  EXPECT_EQ(kA100.tc_n_multiple, 8);
  EXPECT_EQ(kA100.l2_k_multiple, 16);
  EXPECT_EQ(kA100.max_head_dim(), 256);
  EXPECT_NO_THROW(validate(kA100));
}

TEST(ClassifyGemmTest, Examples) {
  EXPECT_EQ(classify_gemm(128, kA100).tier, 1);
  EXPECT_EQ(classify_gemm(130, kA100).tier, 2);
  EXPECT_EQ(classify_gemm(107, kA100).tier, 3);
  EXPECT_THROW(classify_gemm(0, kA100), Error);
}

TEST(Fa2TemplateTest, Examples) {
  const auto& t64 = fa2_template(64, kA100);
  EXPECT_EQ(t64.upper, 64);
  EXPECT_EQ(t64.tile_rows, 128);
  EXPECT_EQ(t64.tile_cols, 128);
  const auto& t97 = fa2_template(97, kA100);
  EXPECT_EQ(t97.upper, 128);
  EXPECT_EQ(t97.tile_cols, 64);
  const auto& t129 = fa2_template(129, kA100);
  EXPECT_EQ(t129.upper, 160);
  EXPECT_EQ(t129.tile_cols, 32);
  EXPECT_EQ(fa2_template(1, kA100).upper, 64);
  EXPECT_EQ(fa2_template(256, kA100).upper, 256);
}

TEST(Fa2TemplateTest, TooLargeIsUnsupported) {
  try {
    fa2_template(257, kA100);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnsupported);
  }
}

TEST(SdpaBackendTest, Examples) {
  EXPECT_EQ(sdpa_backend(128, kA100), SdpaBackend::kFlash);
  EXPECT_EQ(sdpa_backend(129, kA100), SdpaBackend::kMath);
  EXPECT_EQ(sdpa_backend(8, kA100), SdpaBackend::kFlash);
  EXPECT_EQ(sdpa_backend(264, kA100), SdpaBackend::kMath);
}

TEST(IsAlignedTest, Examples) {
  EXPECT_TRUE(is_aligned(104, kA100));
  EXPECT_FALSE(is_aligned(107, kA100));
  EXPECT_TRUE(is_aligned(0, kA100));
}

TEST(AlignmentPropertyTest, TierPeriodicity) {
  for (std::int64_t d = 1; d <= 4096; ++d) {
    ASSERT_EQ(classify_gemm(d, kA100), classify_gemm(d + 8, kA100)) << d;
  }
}

TEST(AlignmentPropertyTest, Fa2MonotoneAndIdempotent) {
  for (std::int64_t d = 1; d < 256; ++d) {
    EXPECT_LE(fa2_template(d, kA100).upper, fa2_template(d + 1, kA100).upper);
    const auto t = fa2_template(d, kA100).upper;
    EXPECT_EQ(fa2_template(t, kA100).upper, t);
    EXPECT_GE(t, d);
  }
}

TEST(AlignmentPropertyTest, AlignedImpliesFlashAndTierOne) {
  for (std::int64_t d = 1; d <= 1024; ++d) {
    if (!is_aligned(d, kA100)) continue;
    EXPECT_EQ(classify_gemm(d, kA100).tier, 1) << d;
    if (d <= 256) {
      EXPECT_EQ(sdpa_backend(d, kA100), SdpaBackend::kFlash) << d;
    }
  }
}

TEST(ConstraintValidationTest, RejectsNonExhaustiveTiers) {
  ConstraintModel cm = kA100;
  cm.gemm_tiers.pop_back();  // odd dimensions no longer match
  EXPECT_THROW(validate(cm), Error);
}

TEST(ConstraintValidationTest, RejectsUnorderedTemplates) {
  ConstraintModel cm = kA100;
  std::swap(cm.fa2_templates[0], cm.fa2_templates[1]);
  EXPECT_THROW(validate(cm), Error);
}

TEST(ConstraintFileTest, RoundTripAndOverride) {
  testing::TempDir dir;
  dir.write("a.json", to_json(kA100).dump());
  EXPECT_EQ(load_constraints(dir.file("a.json")), kA100);

  // A target with 16-wide alignment and flash-only head dims up to 128.
  auto path = dir.write("h.json", R"({
    "min_multiple": 16,
    "fa2_templates": [{"upper": 64, "tile_rows": 128, "tile_cols": 128},
                      {"upper": 128, "tile_rows": 128, "tile_cols": 64}],
    "sdpa_flash_rule": 16})");
  const ConstraintModel cm = load_constraints(path);
  EXPECT_EQ(cm.min_multiple, 16);
  EXPECT_FALSE(is_aligned(104, cm));
  EXPECT_EQ(cm.max_head_dim(), 128);
  EXPECT_EQ(sdpa_backend(120, cm), SdpaBackend::kMath);
  EXPECT_EQ(cm.gemm_tiers, kA100.gemm_tiers);
}

TEST(ConstraintFileTest, InvalidFile) {
  testing::TempDir dir;
  auto path = dir.write("bad.json", R"({"gemm_tiers": [{"modulus": 8, "remainder": 0, "tier": 1}]})");
  EXPECT_THROW(load_constraints(path), Error);
}

}  // namespace
}  // namespace gac
