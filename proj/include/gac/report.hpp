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

// Alignment audits, model-time cost estimates and plot-data export.

#ifndef GAC_REPORT_HPP
#define GAC_REPORT_HPP

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gac/alignment.hpp"
#include "gac/cost_model.hpp"
#include "gac/io.hpp"
#include "gac/model.hpp"

namespace gac {

struct Offender {
  std::string weight_id;
  std::int64_t d = 0;
  int tier = 3;

  friend bool operator==(const Offender&, const Offender&) = default;
};

struct AlignmentReport {
  std::int64_t total = 0;
  std::int64_t aligned = 0;
  double fraction = 1.0;  // 1.0 for an empty allocation
  std::map<std::string, double> by_role;  // filled when a spec is supplied
  std::vector<Offender> offenders;
};

// Classifies every entry by its materialized dimension. Removed weights
// (d = 0) count as aligned.
inline AlignmentReport audit(const Allocation& alloc, const ConstraintModel& cm,
                             const ModelSpec* spec = nullptr) {
  AlignmentReport r;
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> roles;
  for (const auto& e : alloc.entries) {
    ++r.total;
    const bool ok = is_aligned(e.d_int, cm);
    if (ok) {
      ++r.aligned;
    } else {
      r.offenders.push_back({e.weight_id, e.d_int, classify_gemm(e.d_int, cm).tier});
    }
    if (spec) {
      if (const WeightSpec* w = spec->find(e.weight_id)) {
        auto& [n, a] = roles[std::string(to_string(w->role))];
        ++n;
        a += ok ? 1 : 0;
      }
    }
  }
  if (r.total > 0) r.fraction = static_cast<double>(r.aligned) / r.total;
  for (const auto& [role, na] : roles) {
    r.by_role[role] = static_cast<double>(na.second) / na.first;
  }
  return r;
}

inline std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * fraction);
  return buf;
}

// Lists at most `max_offenders` misaligned entries, then a count of the rest.
inline std::string format_report(const AlignmentReport& r,
                                 std::size_t max_offenders = SIZE_MAX) {
  std::ostringstream out;
  out << format_percent(r.fraction) << " aligned (" << r.aligned << "/"
      << r.total << ")\n";
  for (const auto& [role, f] : r.by_role) {
    out << "  " << role << ": " << format_percent(f) << "\n";
  }
  for (std::size_t i = 0; i < r.offenders.size() && i < max_offenders; ++i) {
    const auto& o = r.offenders[i];
    out << "  misaligned " << o.weight_id << " d=" << o.d << " tier " << o.tier
        << "\n";
  }
  if (r.offenders.size() > max_offenders) {
    out << "  ... and " << r.offenders.size() - max_offenders << " more\n";
  }
  return out.str();
}

// Sum of per-weight kernel latency (microseconds of model time, not wall
// clock). Removed weights cost nothing.
inline double estimate_model_cost(const ModelSpec& spec, const Allocation& alloc,
                                  std::int64_t seq, const CostOracle& oracle) {
  const auto entries = entries_in_spec_order(spec, alloc);
  double total = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (entries[i]->d_int == 0) continue;
    total += weight_latency(spec.weights[i], entries[i]->d_int, seq, oracle);
  }
  return total;
}

struct SpeedupEstimate {
  double baseline_cost = 0.0;
  double candidate_cost = 0.0;
  double ratio = 0.0;  // baseline / candidate; > 1 means faster
};

inline SpeedupEstimate estimate_speedup(const ModelSpec& spec,
                                        const Allocation& baseline,
                                        const Allocation& candidate,
                                        std::int64_t seq,
                                        const CostOracle& oracle) {
  SpeedupEstimate s;
  s.baseline_cost = estimate_model_cost(spec, baseline, seq, oracle);
  s.candidate_cost = estimate_model_cost(spec, candidate, seq, oracle);
  if (!(s.baseline_cost > 0) || !(s.candidate_cost > 0)) {
    fail(ErrorKind::kInvalidArgument, "speedup needs positive costs");
  }
  s.ratio = s.baseline_cost / s.candidate_cost;
  return s;
}

// CSV: layer,role,d,aligned — one row per allocation entry in spec order.
inline std::string scatter_csv(const ModelSpec& spec, const Allocation& alloc,
                               const ConstraintModel& cm) {
  const auto entries = entries_in_spec_order(spec, alloc);
  std::ostringstream out;
  out << "layer,role,d,aligned\n";
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto& w = spec.weights[i];
    const auto d = entries[i]->d_int;
    out << w.layer << ',' << to_string(w.role) << ',' << d << ','
        << (is_aligned(d, cm) ? 1 : 0) << '\n';
  }
  return out.str();
}

inline void export_scatter(const ModelSpec& spec, const Allocation& alloc,
                           const ConstraintModel& cm,
                           const std::filesystem::path& path) {
  write_file_atomic(path, scatter_csv(spec, alloc, cm));
}

struct ScatterRow {
  int layer = 0;
  std::string role;
  std::int64_t d = 0;
  bool aligned = false;
};

inline std::vector<ScatterRow> parse_scatter_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != "layer,role,d,aligned") {
    fail(ErrorKind::kParse, "scatter CSV: bad header");
  }
  std::vector<ScatterRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string layer, role, d, aligned;
    if (!std::getline(fields, layer, ',') || !std::getline(fields, role, ',') ||
        !std::getline(fields, d, ',') || !std::getline(fields, aligned)) {
      fail(ErrorKind::kParse, "scatter CSV: malformed row '" + line + "'");
    }
    rows.push_back({std::stoi(layer), role, std::stoll(d), aligned == "1"});
  }
  return rows;
}

}  // namespace gac

#endif  // GAC_REPORT_HPP
