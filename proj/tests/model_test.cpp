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

#include "gac/model.hpp"

#include <algorithm>
#include <random>

#include "gac/model_io.hpp"
#include "gac/presets.hpp"
#include "gtest/gtest.h"
#include "test_util.hpp"

namespace gac {
namespace {

using testing::TempDir;

TEST(LoadModelSpecTest, MinimalSpec) {
  TempDir dir;
  auto path = dir.write("m.json", R"({
    "format_version": "1", "name": "tiny",
    "weights": [{"id": "w0", "layer": 0, "role": "other", "rows": 8,
                 "d_full": 16, "d_min": 0, "axis": "inner", "factor_count": 1}]
  })");
  const ModelSpec spec = load_model_spec(path);
  ASSERT_EQ(spec.size(), 1u);
  EXPECT_EQ(spec.total_full_params(), 128);
}

TEST(LoadModelSpecTest, DMinDefaultsToZero) {
  TempDir dir;
  auto path = dir.write("m.json", R"({"name": "t", "weights": [
    {"id": "a", "layer": 0, "role": "gate", "rows": 4, "d_full": 8,
     "axis": "output", "factor_count": 1}]})");
  EXPECT_EQ(load_model_spec(path).weights[0].d_min, 0);
}

TEST(LoadModelSpecTest, LlamaTemplateHas224Weights) {
  TempDir dir;
  save_model_spec(dir.file("llama.json"), llama3_8b_spec());
  const ModelSpec spec = load_model_spec(dir.file("llama.json"));
  EXPECT_EQ(spec.size(), 224u);
}

TEST(LoadModelSpecTest, DuplicateIdIsRejected) {
  TempDir dir;
  auto path = dir.write("m.json", R"({"name": "t", "weights": [
    {"id": "w0", "layer": 0, "role": "other", "rows": 8, "d_full": 16,
     "axis": "inner", "factor_count": 1},
    {"id": "w0", "layer": 1, "role": "other", "rows": 8, "d_full": 16,
     "axis": "inner", "factor_count": 1}]})");
  try {
    load_model_spec(path);
    FAIL() << "expected a duplicate-id error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
    EXPECT_NE(std::string(e.what()).find("duplicate weight id 'w0'"),
              std::string::npos);
  }
}

TEST(LoadModelSpecTest, ErrorsNameWeightAndField) {
  TempDir dir;
  auto dmin = dir.write("a.json", R"({"name": "t", "weights": [
    {"id": "wx", "layer": 0, "role": "other", "rows": 8, "d_full": 16,
     "d_min": 17, "axis": "inner", "factor_count": 1}]})");
  auto cols = dir.write("b.json", R"({"name": "t", "weights": [
    {"id": "wy", "layer": 0, "role": "other", "rows": 8, "d_full": 16,
     "axis": "inner", "factor_count": 2}]})");
  auto missing = dir.write("c.json", R"({"name": "t", "weights": [
    {"id": "wz", "layer": 0, "role": "other", "d_full": 16,
     "axis": "inner", "factor_count": 1}]})");
  auto expect_msg = [](const std::filesystem::path& p, const std::string& a,
                       const std::string& b) {
    try {
      load_model_spec(p);
      ADD_FAILURE() << "expected an error for " << p;
    } catch (const Error& e) {
      const std::string msg = e.what();
      EXPECT_NE(msg.find(a), std::string::npos) << msg;
      EXPECT_NE(msg.find(b), std::string::npos) << msg;
    }
  };
  expect_msg(dmin, "'wx'", "d_min");
  expect_msg(cols, "'wy'", "cols");
  expect_msg(missing, "'wz'", "rows");
}

TEST(LoadModelSpecTest, MalformedJsonIsParseError) {
  TempDir dir;
  auto path = dir.write("m.json", "{ not json");
  try {
    load_model_spec(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
  }
  try {
    load_model_spec(dir.file("absent.json"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST(LoadModelSpecTest, RejectsUnknownFormatVersion) {
  TempDir dir;
  auto path = dir.write("m.json", R"({"format_version": "2", "name": "t", "weights": []})");
  EXPECT_THROW(load_model_spec(path), Error);
}

TEST(TotalParamsTest, PruningWeight) {
  ModelSpec spec{"m", {testing::pruning_weight("w", 8, 32)}, {}};
  auto alloc = make_allocation(spec, {16.0}, AllocationKind::kAligned);
  EXPECT_EQ(total_params(spec, alloc), 128);
}

TEST(TotalParamsTest, FactorizedWeight) {
  // d * (rows + cols) = 107 * 2048
  ModelSpec spec{"m", {testing::lowrank_weight("w", 1024, 1024, 512)}, {}};
  auto alloc = make_allocation(spec, {107.0}, AllocationKind::kAligned);
  EXPECT_EQ(total_params(spec, alloc), 219136);
}

TEST(TotalParamsTest, EmptyIsZero) {
  ModelSpec spec;
  Allocation alloc;
  EXPECT_EQ(total_params(spec, alloc), 0);
}

TEST(TotalParamsTest, MissingAndExtraIds) {
  ModelSpec spec{"m", {testing::pruning_weight("a", 8, 16),
                       testing::pruning_weight("b", 8, 16)}, {}};
  Allocation missing;
  missing.entries.push_back(make_entry(spec.weights[0], 8));
  EXPECT_THROW(total_params(spec, missing), Error);

  Allocation extra = make_allocation(spec, {8, 8}, AllocationKind::kAligned);
  extra.entries.push_back(make_entry(testing::pruning_weight("c", 1, 1), 1));
  EXPECT_THROW(total_params(spec, extra), Error);
}

TEST(MakeBudgetTest, PaperQuantizationPreset) {
  const ModelSpec spec = uniform_pruning_spec(100, 1024, 1024);
  const Budget b = make_budget(spec, 0.15);
  EXPECT_EQ(b.total_full, 104857600);
  EXPECT_EQ(b.budget_params, 89128960);
}

TEST(MakeBudgetTest, IdentityAndHalf) {
  ModelSpec spec{"m", {testing::pruning_weight("w", 10, 100)}, {}};
  EXPECT_EQ(make_budget(spec, 0.0).budget_params, 1000);
  EXPECT_EQ(make_budget(spec, 0.5).budget_params, 500);
}

TEST(MakeBudgetTest, RatioOutOfRange) {
  ModelSpec spec{"m", {testing::pruning_weight("w", 10, 100)}, {}};
  EXPECT_THROW(make_budget(spec, 1.0), Error);
  EXPECT_THROW(make_budget(spec, -0.1), Error);
  EXPECT_THROW(make_budget(spec, std::nan("")), Error);
}

TEST(ModelPropertyTest, SerializationRoundTrip) {
  std::mt19937_64 rng(7);
  TempDir dir;
  for (int trial = 0; trial < 50; ++trial) {
    ModelSpec spec = testing::random_spec(rng, 1 + trial % 9);
    spec.name = "spec" + std::to_string(trial);
    spec.metadata = {{"trial", std::to_string(trial)}, {"k", "v"}};
    for (auto& w : spec.weights) w.d_min = static_cast<std::int64_t>(rng() % 8);
    save_model_spec(dir.file("s.json"), spec);
    EXPECT_EQ(load_model_spec(dir.file("s.json")), spec);
  }
}

TEST(ModelPropertyTest, ParamsStrictlyIncreasing) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    for (const auto& w : testing::random_spec(rng, 8).weights) {
      for (std::int64_t d = 0; d < w.d_full; ++d) {
        ASSERT_LT(w.params(d), w.params(d + 1)) << w.id;
      }
    }
  }
}

TEST(ModelPropertyTest, TotalParamsPermutationInvariant) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const ModelSpec spec = testing::random_spec(rng, 6);
    std::vector<double> dims;
    for (const auto& w : spec.weights) dims.push_back(static_cast<double>(rng() % (w.d_full + 1)));
    Allocation a = make_allocation(spec, dims, AllocationKind::kAligned);
    const auto expected = total_params(spec, a);
    std::shuffle(a.entries.begin(), a.entries.end(), rng);
    EXPECT_EQ(total_params(spec, a), expected);
    EXPECT_EQ(expected, a.total_params);
  }
}

TEST(AllocationIoTest, RoundTripAndValidation) {
  TempDir dir;
  ModelSpec spec{"m", {testing::pruning_weight("a", 8, 128),
                       testing::lowrank_weight("b", 16, 32, 64)}, {}};
  const Allocation base =
      make_allocation(spec, {107.3, 40.5}, AllocationKind::kMisalignedBaseline);
  EXPECT_EQ(base.entries[0].d_int, 107);
  EXPECT_EQ(base.entries[1].d_int, 41);  // round half up
  save_allocation(dir.file("a.json"), base);
  EXPECT_EQ(load_allocation(dir.file("a.json")), base);

  auto bad = dir.write("bad.json", R"({"model": "m", "kind": "aligned",
    "entries": [{"weight_id": "a", "d": 7.5, "d_int": 8, "params": 64}],
    "total_params": 64})");
  EXPECT_THROW(load_allocation(bad), Error);
  auto sum = dir.write("sum.json", R"({"model": "m", "kind": "aligned",
    "entries": [{"weight_id": "a", "d": 8, "d_int": 8, "params": 64}],
    "total_params": 65})");
  EXPECT_THROW(load_allocation(sum), Error);
}

}  // namespace
}  // namespace gac
