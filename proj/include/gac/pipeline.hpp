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

// End-to-end allocation: importance-proportional baseline, aligned candidate
// sweep, then the knapsack re-selection under the same parameter budget.

#ifndef GAC_PIPELINE_HPP
#define GAC_PIPELINE_HPP

#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include "gac/alignment.hpp"
#include "gac/cost_model.hpp"
#include "gac/importance.hpp"
#include "gac/io.hpp"
#include "gac/model.hpp"
#include "gac/solver.hpp"
#include "gac/sweep.hpp"

namespace gac {

struct PipelineOptions {
  SweepConfig sweep;
};

struct Diagnostics {
  std::string allocator = "proportional water-filling (bisection on lambda)";
  double lambda = 0.0;
  std::int64_t budget_params = 0;
  std::int64_t unit = 0;
  std::int64_t budget_units = 0;         // B' = floor(B / u)
  double unscaled_units = 0.0;           // |W| / u
  double raw_to_quantized_factor = 0.0;  // B / B'
  DpStats dp;
  double objective = 0.0;
  double allocate_ms = 0.0;
  double sweep_ms = 0.0;
  double solve_ms = 0.0;
  OracleMode oracle_mode = OracleMode::kAnalytic;
};

struct PipelineResult {
  Budget budget;
  Allocation baseline;
  std::vector<CandidateSet> candidates;
  Allocation aligned;
  Diagnostics diagnostics;
};

namespace detail {

template <typename F>
auto run_stage(const char* stage, F&& f) {
  try {
    return std::forward<F>(f)();
  } catch (const InfeasibleError& e) {
    throw InfeasibleError(std::string(stage) + ": " + e.what(), e.gap());
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(stage) + ": " + e.what());
  }
}

inline double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace detail

inline PipelineResult solve_pipeline(const ModelSpec& spec,
                                     const ScoreSet& scores, double ratio,
                                     const ConstraintModel& cm,
                                     const CostOracle& oracle,
                                     const PipelineOptions& options = {}) {
  using Clock = std::chrono::steady_clock;
  PipelineResult r;
  auto& diag = r.diagnostics;
  diag.oracle_mode = oracle.mode();

  auto t0 = Clock::now();
  BaselineInfo info;
  detail::run_stage("allocate", [&] {
    r.budget = make_budget(spec, ratio);
    r.baseline = unconstrained_allocate(spec, scores, r.budget, &info);
    return 0;
  });
  diag.allocate_ms = detail::ms_since(t0);
  diag.lambda = info.lambda;
  diag.budget_params = r.budget.budget_params;

  t0 = Clock::now();
  r.candidates = detail::run_stage("sweep", [&] {
    return sweep_all(spec, r.baseline, cm, oracle, options.sweep, &scores);
  });
  diag.sweep_ms = detail::ms_since(t0);

  t0 = Clock::now();
  auto solved = detail::run_stage("solve", [&] {
    return knapsack_solve(r.candidates, spec, scores, r.budget, cm);
  });
  diag.solve_ms = detail::ms_since(t0);

  r.aligned = std::move(solved.allocation);
  diag.unit = solved.unit;
  diag.budget_units = solved.budget_units;
  if (solved.unit > 0) {
    diag.unscaled_units = static_cast<double>(r.budget.total_full) / solved.unit;
  }
  if (solved.budget_units > 0) {
    diag.raw_to_quantized_factor =
        static_cast<double>(r.budget.budget_params) / solved.budget_units;
  }
  diag.dp = solved.stats;
  diag.objective = solved.objective;
  return r;
}

inline Json to_json(const Diagnostics& d) {
  return {{"format_version", std::string(kFormatVersion)},
          {"allocator", d.allocator},
          {"lambda", d.lambda},
          {"budget_params", d.budget_params},
          {"unit", d.unit},
          {"budget_units", d.budget_units},
          {"unscaled_units", d.unscaled_units},
          {"raw_to_quantized_factor", d.raw_to_quantized_factor},
          {"dp",
           {{"rows", d.dp.rows},
            {"cols", d.dp.cols},
            {"cells", d.dp.rows * d.dp.cols},
            {"updates", d.dp.updates},
            {"update_bound", d.dp.update_bound},
            {"exact_tie_break", d.dp.exact_tie_break}}},
          {"objective", d.objective},
          {"timings_ms",
           {{"allocate", d.allocate_ms},
            {"sweep", d.sweep_ms},
            {"solve", d.solve_ms}}},
          {"oracle_mode",
           d.oracle_mode == OracleMode::kAnalytic ? "analytic" : "profiled"}};
}

}  // namespace gac

#endif  // GAC_PIPELINE_HPP
