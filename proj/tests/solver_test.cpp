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

#include "gac/solver.hpp"

#include <random>
#include <set>

#include "gac/presets.hpp"
#include "gtest/gtest.h"
#include "test_util.hpp"

namespace gac {
namespace {

using Dims = std::vector<std::int64_t>;

const ConstraintModel kCm = default_constraints();

Dims dims_of(const Allocation& a) {
  Dims out;
  for (const auto& e : a.entries) out.push_back(e.d_int);
  return out;
}

Budget raw_budget(const ModelSpec& spec, std::int64_t b) {
  Budget budget;
  budget.total_full = spec.total_full_params();
  budget.budget_params = b;
  return budget;
}

// Random multi-choice instance: up to `max_n` weights with 1..`max_c`
// aligned candidates each and a budget between the cheapest and dearest
// selections (occasionally below the cheapest).
struct RandomInstance {
  ModelSpec spec;
  ScoreSet scores;
  std::vector<CandidateSet> sets;
  Budget budget;
};

RandomInstance random_instance(std::mt19937_64& rng, int max_n, int max_c) {
  RandomInstance r;
  const int n = 1 + static_cast<int>(rng() % max_n);
  r.spec = testing::random_spec(rng, n);
  r.scores = testing::random_scores(rng, r.spec);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::int64_t lo = 0, hi = 0;
  for (const auto& w : r.spec.weights) {
    const std::int64_t slots = w.d_full / 8;
    std::set<std::int64_t> c;
    const int k = 1 + static_cast<int>(rng() % max_c);
    while (static_cast<int>(c.size()) < std::min<std::int64_t>(k, slots)) {
      c.insert(8 * (1 + static_cast<std::int64_t>(rng() % slots)));
    }
    CandidateSet s{w.id, u(rng) * static_cast<double>(w.d_full), {c.begin(), c.end()}};
    lo += w.params(s.candidates.front());
    hi += w.params(s.candidates.back());
    r.sets.push_back(std::move(s));
  }
  const double t = -0.05 + 1.1 * u(rng);
  r.budget = raw_budget(r.spec, lo + static_cast<std::int64_t>(t * static_cast<double>(hi - lo)));
  return r;
}

TEST(UnconstrainedAllocateTest, SymmetricHalf) {
  ModelSpec spec{"m", {}, {}};
  ScoreSet scores;
  for (int i = 0; i < 4; ++i) {
    spec.weights.push_back(testing::pruning_weight("w" + std::to_string(i), 32, 64));
    scores.scores[spec.weights.back().id] = 3.0;
  }
  const Allocation a = unconstrained_allocate(spec, scores, make_budget(spec, 0.5));
  EXPECT_EQ(a.kind, AllocationKind::kMisalignedBaseline);
  for (const auto& e : a.entries) EXPECT_EQ(e.d, 32.0);
}

TEST(UnconstrainedAllocateTest, ClampsAtFull) {
  ModelSpec spec{"m", {testing::pruning_weight("a", 8, 16), testing::pruning_weight("b", 8, 16)}, {}};
  ScoreSet scores{{{"a", 2.0}, {"b", 1.0}}, Proxy::kExternal};
  const Allocation a = unconstrained_allocate(spec, scores, raw_budget(spec, 192));
  EXPECT_NEAR(a.entries[0].d, 16.0, 1e-9);
  EXPECT_NEAR(a.entries[1].d, 8.0, 1e-9);
  EXPECT_EQ(a.total_params, 192);
}

TEST(UnconstrainedAllocateTest, InfeasibleBudget) {
  ModelSpec spec{"m", {testing::pruning_weight("a", 8, 16, 10)}, {}};
  ScoreSet scores{{{"a", 1.0}}, Proxy::kExternal};
  try {
    unconstrained_allocate(spec, scores, raw_budget(spec, 79));
    FAIL();
  } catch (const InfeasibleError& e) {
    EXPECT_EQ(e.gap(), 1);
  }
}

TEST(UnconstrainedAllocatePropertyTest, MeetsBudgetAndProportional) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ratio(0.05, 0.9);
  for (int trial = 0; trial < 200; ++trial) {
    const ModelSpec spec = testing::random_spec(rng, 1 + trial % 12);
    const ScoreSet scores = testing::random_scores(rng, spec);
    const Budget b = make_budget(spec, ratio(rng));
    BaselineInfo info;
    const Allocation a = unconstrained_allocate(spec, scores, b, &info);
    EXPECT_NEAR(info.params_exact, static_cast<double>(b.budget_params), 1.0);
    for (std::size_t i = 0; i < spec.size(); ++i) {
      const auto& w = spec.weights[i];
      const double want = std::clamp(info.lambda * scores.at(w.id), 0.0,
                                     static_cast<double>(w.d_full));
      EXPECT_NEAR(a.entries[i].d, want, 1e-6 * w.d_full);
    }
  }
}

TEST(MinCostUnitTest, Examples) {
  EXPECT_EQ(min_cost_unit(uniform_pruning_spec(100, 1024, 1024), kCm), 8192);
  ModelSpec one{"m", {testing::pruning_weight("a", 1, 8)}, {}};
  EXPECT_EQ(min_cost_unit(one, kCm), 8);
  ModelSpec mixed{"m", {testing::pruning_weight("a", 8, 8), testing::pruning_weight("b", 1024, 8)}, {}};
  EXPECT_EQ(min_cost_unit(mixed, kCm), 64);
  ModelSpec low{"m", {testing::lowrank_weight("a", 100, 28, 8), testing::pruning_weight("b", 1024, 8)}, {}};
  EXPECT_EQ(min_cost_unit(low, kCm), 8 * 128);
  EXPECT_THROW(min_cost_unit(ModelSpec{}, kCm), Error);
}

TEST(QuantizeTest, Examples) {
  // 0.85 * 100 * 1024^2 = 89,128,960 = 8192 * 10,880 exactly.
  EXPECT_EQ(quantize_budget(89128960, 8192), 10880);
  EXPECT_EQ(quantize_budget(89128959, 8192), 10879);
  EXPECT_EQ(quantize_cost(8191, 8192), 1);
  EXPECT_EQ(quantize_cost(8192, 8192), 1);
  EXPECT_EQ(quantize_cost(8193, 8192), 2);
  EXPECT_EQ(quantize_cost(0, 8192), 0);
  KnapsackInstance inst;
  inst.groups = {{{8, 1.0, 77, 0}, {16, 2.0, 154, 0}}};
  inst.budget = 200;
  const auto q = quantize(inst, 1);
  EXPECT_EQ(q.groups[0][0].cost_units, 77);
  EXPECT_EQ(q.groups[0][1].cost_units, 154);
  EXPECT_EQ(q.budget_units, 200);
  EXPECT_THROW(quantize(inst, 0), Error);
}

TEST(KnapsackSolveTest, WorkedExample) {
  ModelSpec spec{"m", {testing::pruning_weight("a", 8, 16), testing::pruning_weight("b", 8, 16)}, {}};
  ScoreSet scores{{{"a", 2.0}, {"b", 1.0}}, Proxy::kExternal};
  std::vector<CandidateSet> sets = {{"a", 10.0, {8, 16}}, {"b", 10.0, {8, 16}}};
  const auto r = knapsack_solve(sets, spec, scores, raw_budget(spec, 192), kCm);
  EXPECT_EQ(dims_of(r.allocation), (Dims{16, 8}));
  EXPECT_EQ(r.objective, 80.0);
  EXPECT_EQ(r.unit, 64);
  EXPECT_EQ(r.budget_units, 3);
  EXPECT_EQ(r.allocation.total_params, 192);
  EXPECT_EQ(r.allocation.kind, AllocationKind::kAligned);
}

TEST(KnapsackSolveTest, ForcedChoice) {
  ModelSpec spec{"m", {testing::pruning_weight("a", 8, 64)}, {}};
  ScoreSet scores{{{"a", 5.0}}, Proxy::kExternal};
  std::vector<CandidateSet> sets = {{"a", 40.0, {16}}};
  const auto r = knapsack_solve(sets, spec, scores, raw_budget(spec, 400), kCm);
  EXPECT_EQ(dims_of(r.allocation), (Dims{16}));
  EXPECT_LT(r.objective, 0.0);
}

TEST(KnapsackSolveTest, FixedPoint) {
  ModelSpec spec{"m", {testing::pruning_weight("a", 8, 64), testing::pruning_weight("b", 24, 64)}, {}};
  ScoreSet scores{{{"a", 1.0}, {"b", 1.0}}, Proxy::kExternal};
  std::vector<CandidateSet> sets = {{"a", 40.0, {40}}, {"b", 24.0, {24}}};
  const auto r = knapsack_solve(sets, spec, scores, raw_budget(spec, 8 * 40 + 24 * 24), kCm);
  EXPECT_EQ(dims_of(r.allocation), (Dims{40, 24}));
  EXPECT_EQ(r.objective, 0.0);
}

TEST(KnapsackSolveTest, InfeasibleReportsGap) {
  ModelSpec spec{"m", {testing::pruning_weight("a", 8, 64), testing::pruning_weight("b", 8, 64)}, {}};
  ScoreSet scores{{{"a", 1.0}, {"b", 1.0}}, Proxy::kExternal};
  std::vector<CandidateSet> sets = {{"a", 10.0, {16, 24}}, {"b", 10.0, {16}}};
  try {
    knapsack_solve(sets, spec, scores, raw_budget(spec, 200), kCm);
    FAIL();
  } catch (const InfeasibleError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInfeasible);
    EXPECT_EQ(e.gap(), 56);
  }
}

TEST(KnapsackSolveTest, RejectsMismatchedSets) {
  ModelSpec spec{"m", {testing::pruning_weight("a", 8, 64)}, {}};
  ScoreSet scores{{{"a", 1.0}}, Proxy::kExternal};
  EXPECT_THROW(knapsack_solve({}, spec, scores, raw_budget(spec, 100), kCm), Error);
  EXPECT_THROW(knapsack_solve({{"z", 1.0, {8}}}, spec, scores, raw_budget(spec, 100), kCm), Error);
  EXPECT_THROW(knapsack_solve({{"a", 1.0, {}}}, spec, scores, raw_budget(spec, 100), kCm), Error);
}

TEST(KnapsackSolveTest, EqualValuesPreferLowerCostThenLexicographic) {
  // Zero scores make every selection worth 0.
  ModelSpec spec{"m", {testing::pruning_weight("a", 8, 64), testing::pruning_weight("b", 8, 64)}, {}};
  ScoreSet scores{{{"a", 0.0}, {"b", 0.0}}, Proxy::kExternal};
  std::vector<CandidateSet> sets = {{"a", 8.0, {8, 16}}, {"b", 8.0, {8, 16}}};
  auto r = knapsack_solve(sets, spec, scores, raw_budget(spec, 1000), kCm);
  EXPECT_EQ(dims_of(r.allocation), (Dims{8, 8}));
  // Two equal-value, equal-cost optima: (8, 16) and (16, 8).
  ScoreSet equal{{{"a", 1.0}, {"b", 1.0}}, Proxy::kExternal};
  r = knapsack_solve(sets, spec, equal, raw_budget(spec, 192), kCm);
  EXPECT_EQ(dims_of(r.allocation), (Dims{8, 16}));
}

TEST(KnapsackPropertyTest, MatchesBruteForce) {
  std::mt19937_64 rng(31);
  int feasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = random_instance(rng, 6, 5);
    const std::int64_t unit = min_cost_unit(inst.spec, kCm);
    const auto want = testing::brute_force(inst.spec, inst.scores, inst.sets,
                                           inst.budget.budget_params, unit);
    if (!want.feasible) {
      EXPECT_THROW(knapsack_solve(inst.sets, inst.spec, inst.scores, inst.budget, kCm),
                   InfeasibleError);
      continue;
    }
    ++feasible;
    const auto got = knapsack_solve(inst.sets, inst.spec, inst.scores, inst.budget, kCm);
    ASSERT_EQ(got.objective, want.value) << "trial " << trial;
    EXPECT_EQ(dims_of(got.allocation), want.dims) << "trial " << trial;
    EXPECT_LE(got.allocation.total_params, inst.budget.budget_params);
  }
  EXPECT_GT(feasible, 200);
}

TEST(KnapsackPropertyTest, MonotoneBudget) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    auto inst = random_instance(rng, 6, 4);
    double prev = -std::numeric_limits<double>::infinity();
    const std::int64_t unit = min_cost_unit(inst.spec, kCm);
    for (int step = 0; step < 8; ++step) {
      try {
        const auto r = knapsack_solve(inst.sets, inst.spec, inst.scores, inst.budget, kCm);
        EXPECT_GE(r.objective, prev);
        prev = r.objective;
      } catch (const InfeasibleError&) {
        EXPECT_EQ(prev, -std::numeric_limits<double>::infinity());
      }
      inst.budget.budget_params += unit / 2 + static_cast<std::int64_t>(rng() % (2 * unit));
    }
  }
}

TEST(KnapsackPropertyTest, ScoreScalingInvariance) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = random_instance(rng, 6, 5);
    Dims reference;
    bool first = true;
    for (double c : {0.01, 1.0, 100.0}) {
      ScoreSet scaled = inst.scores;
      for (auto& [id, v] : scaled.scores) v *= c;
      try {
        const auto r = knapsack_solve(inst.sets, inst.spec, scaled, inst.budget, kCm);
        if (first) reference = dims_of(r.allocation);
        EXPECT_EQ(dims_of(r.allocation), reference) << "trial " << trial << " c=" << c;
      } catch (const InfeasibleError&) {
        EXPECT_TRUE(first || reference.empty());
      }
      first = false;
    }
  }
}

TEST(KnapsackPropertyTest, QuantizationNeverViolatesRawBudget) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 300; ++trial) {
    auto inst = random_instance(rng, 8, 5);
    try {
      const auto r = knapsack_solve(inst.sets, inst.spec, inst.scores, inst.budget, kCm);
      std::int64_t raw = 0;
      for (std::size_t i = 0; i < inst.spec.size(); ++i) {
        raw += inst.spec.weights[i].params(r.allocation.entries[i].d_int);
      }
      EXPECT_LE(raw, inst.budget.budget_params);
      EXPECT_EQ(raw, total_params(inst.spec, r.allocation));
    } catch (const InfeasibleError&) {
    }
  }
}

TEST(KnapsackPropertyTest, UpdateCounterWithinBound) {
  const ModelSpec spec = uniform_pruning_spec(100, 1024, 1024);
  std::mt19937_64 rng(47);
  const ScoreSet scores = testing::random_scores(rng, spec);
  std::vector<CandidateSet> sets;
  for (const auto& w : spec.weights) sets.push_back({w.id, 870.4, {856, 864, 872, 880, 896}});
  const auto r = knapsack_solve(sets, spec, scores, make_budget(spec, 0.15), kCm);
  EXPECT_EQ(r.stats.rows, 101);
  EXPECT_EQ(r.stats.cols, 10881);
  EXPECT_EQ(r.stats.update_bound, 100 * 5 * 10881);
  EXPECT_GT(r.stats.updates, 0);
  EXPECT_LE(r.stats.updates, r.stats.update_bound);
  EXPECT_TRUE(r.stats.exact_tie_break);
}

TEST(KnapsackPropertyTest, WideGroupsFallBackDeterministically) {
  // 70 candidates exceed the 64-bit choice masks.
  ModelSpec spec{"m", {testing::pruning_weight("a", 8, 1024), testing::pruning_weight("b", 16, 1024)}, {}};
  ScoreSet scores{{{"a", 1.5}, {"b", 1.0}}, Proxy::kExternal};
  std::vector<CandidateSet> sets(2);
  sets[0] = {"a", 300.0, {}};
  sets[1] = {"b", 300.0, {}};
  for (std::int64_t d = 8; d <= 560; d += 8) {
    sets[0].candidates.push_back(d);
    sets[1].candidates.push_back(d);
  }
  const auto budget = raw_budget(spec, 8 * 300 + 16 * 300);
  const auto r = knapsack_solve(sets, spec, scores, budget, kCm);
  EXPECT_FALSE(r.stats.exact_tie_break);
  const auto want = testing::brute_force(spec, scores, sets, budget.budget_params, 64);
  EXPECT_EQ(r.objective, want.value);
  EXPECT_LE(r.allocation.total_params, budget.budget_params);
}

}  // namespace
}  // namespace gac
