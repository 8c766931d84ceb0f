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

// Budget allocation.
//
// unconstrained_allocate() is the importance-proportional baseline: each
// weight gets d_i = clamp(lambda * s_i, d_min, d_full) with lambda chosen so
// that the parameter total meets the budget. The dimensions it returns are
// fractional and in general misaligned.
//
// knapsack_solve() re-selects one aligned candidate per weight. It is a
// multi-choice knapsack over
//
//   value  v_ij = s_i * (params_i(d_ij) - params_i(d*_i))
//   cost   w_ij = params_i(d_ij),   sum_i w_ij <= B
//
// solved by dynamic programming over a budget quantized in units of
// u = min_multiple * min_i(per-dimension cost). Costs round up and the budget
// rounds down, so a solution that fits in units always fits in parameters.

#ifndef GAC_SOLVER_HPP
#define GAC_SOLVER_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "gac/alignment.hpp"
#include "gac/importance.hpp"
#include "gac/model.hpp"
#include "gac/sweep.hpp"

namespace gac {

struct BaselineInfo {
  double lambda = 0.0;
  int iterations = 0;
  double params_exact = 0.0;  // sum of params at the fractional dimensions
};

inline Allocation unconstrained_allocate(const ModelSpec& spec,
                                         const ScoreSet& scores,
                                         const Budget& budget,
                                         BaselineInfo* info = nullptr) {
  bind(scores, spec);
  const std::size_t n = spec.size();
  const auto s = scores_in_spec_order(scores, spec);
  const double target = static_cast<double>(budget.budget_params);

  double floor_total = 0.0;
  double ceil_total = 0.0;
  for (const auto& w : spec.weights) {
    floor_total += w.params(static_cast<double>(w.d_min));
    ceil_total += w.params(static_cast<double>(w.d_full));
  }
  if (target < floor_total) {
    const auto gap = static_cast<long long>(std::ceil(floor_total - target));
    throw InfeasibleError("budget " + std::to_string(budget.budget_params) +
                              " is below the minimum " +
                              std::to_string(static_cast<long long>(floor_total)) +
                              " (short by " + std::to_string(gap) + " params)",
                          gap);
  }
  if (target > ceil_total) {
    throw InfeasibleError("budget exceeds the uncompressed parameter count", 0);
  }

  auto dims_at = [&](double lambda) {
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& w = spec.weights[i];
      d[i] = std::clamp(lambda * s[i], static_cast<double>(w.d_min),
                        static_cast<double>(w.d_full));
    }
    return d;
  };
  auto total_at = [&](const std::vector<double>& d) {
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) t += spec.weights[i].params(d[i]);
    return t;
  };

  // Past lambda_hi every weight with a positive score sits at d_full.
  double hi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (s[i] > 0) hi = std::max(hi, static_cast<double>(spec.weights[i].d_full) / s[i]);
  }
  double lo = 0.0;
  std::vector<double> dims = dims_at(hi);
  int iterations = 0;
  if (total_at(dims) > target) {
    for (; iterations < 200 && hi - lo > 1e-15 * hi; ++iterations) {
      const double mid = 0.5 * (lo + hi);
      if (total_at(dims_at(mid)) > target) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    // The total is linear in lambda between clamp breakpoints; solve the
    // active piece exactly.
    double lambda = lo;
    double fixed = 0.0;
    double slope = 0.0;
    const auto d_lo = dims_at(lo);
    const auto d_hi = dims_at(hi);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& w = spec.weights[i];
      const bool free = d_hi[i] > static_cast<double>(w.d_min) &&
                        d_lo[i] < static_cast<double>(w.d_full);
      if (free && s[i] > 0) {
        slope += static_cast<double>(w.per_dim_cost()) * s[i];
      } else {
        fixed += w.params(d_lo[i]);
      }
    }
    if (slope > 0) {
      const double exact = (target - fixed) / slope;
      if (exact >= lo * (1 - 1e-12) && exact <= hi * (1 + 1e-12)) lambda = exact;
    }
    dims = dims_at(lambda);
    if (std::fabs(total_at(dims) - target) > std::fabs(total_at(d_lo) - target)) {
      lambda = lo;
      dims = d_lo;
    }
    hi = lambda;
  }
  if (info) {
    info->lambda = hi;
    info->iterations = iterations;
    info->params_exact = total_at(dims);
  }
  return make_allocation(spec, dims, AllocationKind::kMisalignedBaseline);
}

// u = min_multiple * smallest per-dimension parameter cost.
inline std::int64_t min_cost_unit(const ModelSpec& spec,
                                  const ConstraintModel& cm) {
  if (spec.weights.empty()) {
    fail(ErrorKind::kInvalidArgument, "cost unit of an empty model");
  }
  std::int64_t m = std::numeric_limits<std::int64_t>::max();
  for (const auto& w : spec.weights) m = std::min(m, w.per_dim_cost());
  return cm.min_multiple * m;
}

inline std::int64_t quantize_cost(std::int64_t cost, std::int64_t unit) {
  return (cost + unit - 1) / unit;
}

inline std::int64_t quantize_budget(std::int64_t budget, std::int64_t unit) {
  return budget / unit;
}

struct KnapsackItem {
  std::int64_t d = 0;
  double value = 0.0;
  std::int64_t cost = 0;        // raw parameters
  std::int64_t cost_units = 0;  // ceil(cost / unit)
};

struct KnapsackInstance {
  std::vector<std::vector<KnapsackItem>> groups;  // items ascending in d
  std::int64_t budget = 0;        // raw parameters
  std::int64_t budget_units = 0;  // floor(budget / unit)
  std::int64_t unit = 1;
};

// Fills cost_units and budget_units from raw costs.
inline KnapsackInstance quantize(KnapsackInstance inst, std::int64_t unit) {
  if (unit < 1) fail(ErrorKind::kInvalidArgument, "cost unit must be >= 1");
  inst.unit = unit;
  for (auto& g : inst.groups) {
    for (auto& item : g) item.cost_units = quantize_cost(item.cost, unit);
  }
  inst.budget_units = quantize_budget(inst.budget, unit);
  return inst;
}

struct DpStats {
  std::int64_t rows = 0;            // n + 1
  std::int64_t cols = 0;            // B' + 1
  std::int64_t updates = 0;         // (candidate, b) relaxations performed
  std::int64_t update_bound = 0;    // n * |C_max| * (B' + 1)
  bool exact_tie_break = true;      // false when a group exceeds 64 items
};

struct KnapsackSolution {
  std::vector<std::size_t> choice;  // item index per group
  double value = 0.0;
  std::int64_t cost_units = 0;
  std::int64_t cost = 0;
  DpStats stats;
};

namespace detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline std::int64_t infeasibility_gap(const KnapsackInstance& inst) {
  std::int64_t min_raw = 0;
  std::int64_t min_units = 0;
  for (const auto& g : inst.groups) {
    std::int64_t r = std::numeric_limits<std::int64_t>::max();
    std::int64_t u = std::numeric_limits<std::int64_t>::max();
    for (const auto& item : g) {
      r = std::min(r, item.cost);
      u = std::min(u, item.cost_units);
    }
    min_raw += r;
    min_units += u;
  }
  // Smallest budget increase that makes the quantized instance feasible.
  return std::max(min_raw, min_units * inst.unit) - inst.budget;
}

// Dynamic program with one bitmask per cell recording every choice that
// attains the cell's maximum, which lets the walk below recover the
// lexicographically smallest optimal dimension vector. Only two value rows
// are kept.
template <typename Mask>
KnapsackSolution solve_with_masks(const KnapsackInstance& inst) {
  const std::size_t n = inst.groups.size();
  const std::int64_t bp = inst.budget_units;
  const std::size_t width = static_cast<std::size_t>(bp) + 1;
  KnapsackSolution sol;
  sol.stats.rows = static_cast<std::int64_t>(n) + 1;
  sol.stats.cols = static_cast<std::int64_t>(width);

  std::vector<double> prev(width, kNegInf);
  std::vector<double> cur(width, kNegInf);
  std::vector<Mask> masks(n * width, Mask{0});
  prev[0] = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    std::fill(cur.begin(), cur.end(), kNegInf);
    Mask* row = masks.data() + i * width;
    const auto& group = inst.groups[i];
    for (std::size_t j = 0; j < group.size(); ++j) {
      const std::int64_t w = group[j].cost_units;
      const double v = group[j].value;
      const Mask bit = static_cast<Mask>(Mask{1} << j);
      for (std::int64_t b = w; b <= bp; ++b) {
        ++sol.stats.updates;
        const double base = prev[static_cast<std::size_t>(b - w)];
        if (base == kNegInf) continue;
        const double cand = base + v;
        double& cell = cur[static_cast<std::size_t>(b)];
        if (cand > cell) {
          cell = cand;
          row[b] = bit;
        } else if (cand == cell) {
          row[b] |= bit;
        }
      }
    }
    std::swap(prev, cur);
  }

  std::int64_t best_b = -1;
  for (std::int64_t b = 0; b <= bp; ++b) {
    if (prev[b] == kNegInf) continue;
    if (best_b < 0 || prev[b] > prev[best_b]) best_b = b;
  }
  if (best_b < 0) {
    const auto gap = infeasibility_gap(inst);
    throw InfeasibleError("even the smallest candidates exceed the budget by " +
                              std::to_string(gap) + " params",
                          gap);
  }
  sol.value = prev[best_b];

  // States that lie on some optimal path ending at best_b.
  std::vector<bool> on((n + 1) * width, false);
  on[n * width + best_b] = true;
  for (std::size_t i = n; i >= 1; --i) {
    const Mask* row = masks.data() + (i - 1) * width;
    const auto& group = inst.groups[i - 1];
    for (std::size_t b = 0; b < width; ++b) {
      if (!on[i * width + b]) continue;
      for (Mask m = row[b]; m != 0; m &= static_cast<Mask>(m - 1)) {
        const auto j = static_cast<std::size_t>(std::countr_zero(m));
        on[(i - 1) * width + (b - group[j].cost_units)] = true;
      }
    }
  }

  sol.choice.resize(n);
  std::int64_t b = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    const Mask* row = masks.data() + (i - 1) * width;
    const auto& group = inst.groups[i - 1];
    bool moved = false;
    for (std::size_t j = 0; j < group.size() && !moved; ++j) {
      const std::int64_t nb = b + group[j].cost_units;
      if (nb > bp || !on[i * width + nb]) continue;
      if ((row[nb] >> j) & Mask{1}) {
        sol.choice[i - 1] = j;
        b = nb;
        moved = true;
      }
    }
    if (!moved) fail(ErrorKind::kValidation, "knapsack backtrack lost the optimal path");
  }
  return sol;
}

// Groups larger than 64 items: one stored choice per cell (the first item,
// in ascending d, to reach the maximum). Deterministic, but ties are only
// broken lexicographically from the last group backwards.
inline KnapsackSolution solve_with_choices(const KnapsackInstance& inst) {
  const std::size_t n = inst.groups.size();
  const std::int64_t bp = inst.budget_units;
  const std::size_t width = static_cast<std::size_t>(bp) + 1;
  KnapsackSolution sol;
  sol.stats.rows = static_cast<std::int64_t>(n) + 1;
  sol.stats.cols = static_cast<std::int64_t>(width);
  sol.stats.exact_tie_break = false;

  std::vector<double> prev(width, kNegInf), cur(width, kNegInf);
  std::vector<std::uint32_t> choice(n * width, 0);
  prev[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(cur.begin(), cur.end(), kNegInf);
    const auto& group = inst.groups[i];
    for (std::size_t j = 0; j < group.size(); ++j) {
      const std::int64_t w = group[j].cost_units;
      for (std::int64_t b = w; b <= bp; ++b) {
        ++sol.stats.updates;
        const double base = prev[b - w];
        if (base == kNegInf) continue;
        const double cand = base + group[j].value;
        if (cand > cur[b]) {
          cur[b] = cand;
          choice[i * width + b] = static_cast<std::uint32_t>(j);
        }
      }
    }
    std::swap(prev, cur);
  }
  std::int64_t best_b = -1;
  for (std::int64_t b = 0; b <= bp; ++b) {
    if (prev[b] != kNegInf && (best_b < 0 || prev[b] > prev[best_b])) best_b = b;
  }
  if (best_b < 0) {
    const auto gap = infeasibility_gap(inst);
    throw InfeasibleError("even the smallest candidates exceed the budget by " +
                              std::to_string(gap) + " params",
                          gap);
  }
  sol.value = prev[best_b];
  sol.choice.resize(n);
  std::int64_t b = best_b;
  for (std::size_t i = n; i-- > 0;) {
    const std::uint32_t j = choice[i * width + b];
    sol.choice[i] = j;
    b -= inst.groups[i][j].cost_units;
  }
  return sol;
}

}  // namespace detail

// Exactly one item per group, maximizing total value with total cost_units <=
// budget_units. Ties go to the smaller total cost, then to the
// lexicographically smallest vector of chosen dimensions.
inline KnapsackSolution solve_knapsack(const KnapsackInstance& inst) {
  std::size_t widest = 0;
  for (const auto& g : inst.groups) {
    if (g.empty()) fail(ErrorKind::kInvalidArgument, "knapsack group has no items");
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (g[j].cost_units < 0) fail(ErrorKind::kInvalidArgument, "negative item cost");
      if (j > 0 && !(g[j - 1].d < g[j].d)) {
        fail(ErrorKind::kInvalidArgument, "knapsack items must ascend in d");
      }
    }
    widest = std::max(widest, g.size());
  }
  if (inst.budget_units < 0) {
    throw InfeasibleError("negative budget", -inst.budget_units * inst.unit);
  }
  KnapsackSolution sol;
  if (widest <= 8) {
    sol = detail::solve_with_masks<std::uint8_t>(inst);
  } else if (widest <= 16) {
    sol = detail::solve_with_masks<std::uint16_t>(inst);
  } else if (widest <= 32) {
    sol = detail::solve_with_masks<std::uint32_t>(inst);
  } else if (widest <= 64) {
    sol = detail::solve_with_masks<std::uint64_t>(inst);
  } else {
    sol = detail::solve_with_choices(inst);
  }
  sol.stats.update_bound = static_cast<std::int64_t>(inst.groups.size()) *
                           static_cast<std::int64_t>(widest) * sol.stats.cols;
  for (std::size_t i = 0; i < inst.groups.size(); ++i) {
    const auto& item = inst.groups[i][sol.choice[i]];
    sol.cost_units += item.cost_units;
    sol.cost += item.cost;
  }
  return sol;
}

// Value v_ij = s_i * (params(d_ij) - params(d*_i)) with params(d*) taken at
// the fractional d*, and raw cost params(d_ij).
inline KnapsackInstance build_instance(const std::vector<CandidateSet>& cands,
                                       const ModelSpec& spec,
                                       const ScoreSet& scores,
                                       const Budget& budget) {
  if (cands.size() != spec.size()) {
    fail(ErrorKind::kInvalidArgument,
         "expected one candidate set per weight (" +
             std::to_string(spec.size()) + "), got " +
             std::to_string(cands.size()));
  }
  KnapsackInstance inst;
  inst.budget = budget.budget_params;
  inst.groups.reserve(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto& w = spec.weights[i];
    const auto& set = cands[i];
    if (set.weight_id != w.id) {
      fail(ErrorKind::kInvalidArgument, "candidate set #" + std::to_string(i) +
                                            " is for '" + set.weight_id +
                                            "', expected '" + w.id + "'");
    }
    if (set.candidates.empty()) {
      fail(ErrorKind::kInvalidArgument,
           "weight '" + w.id + "' has an empty candidate set");
    }
    const double s = scores.at(w.id);
    const double star = w.params(set.d_star);
    std::vector<KnapsackItem> group;
    for (std::int64_t d : set.candidates) {
      KnapsackItem item;
      item.d = d;
      item.cost = w.params(d);
      item.value = s * (static_cast<double>(item.cost) - star);
      group.push_back(item);
    }
    inst.groups.push_back(std::move(group));
  }
  return inst;
}

struct KnapsackResult {
  Allocation allocation;  // kind = aligned
  double objective = 0.0;
  std::int64_t unit = 1;
  std::int64_t budget_units = 0;
  DpStats stats;
};

inline KnapsackResult knapsack_solve(const std::vector<CandidateSet>& cands,
                                     const ModelSpec& spec,
                                     const ScoreSet& scores,
                                     const Budget& budget,
                                     const ConstraintModel& cm) {
  KnapsackResult out;
  if (spec.weights.empty()) {
    out.allocation = make_allocation(spec, {}, AllocationKind::kAligned);
    return out;
  }
  out.unit = min_cost_unit(spec, cm);
  const auto inst =
      quantize(build_instance(cands, spec, scores, budget), out.unit);
  out.budget_units = inst.budget_units;
  const auto sol = solve_knapsack(inst);
  std::vector<double> dims;
  dims.reserve(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    dims.push_back(static_cast<double>(inst.groups[i][sol.choice[i]].d));
  }
  out.allocation = make_allocation(spec, dims, AllocationKind::kAligned);
  out.objective = sol.value;
  out.stats = sol.stats;
  return out;
}

}  // namespace gac

#endif  // GAC_SOLVER_HPP
