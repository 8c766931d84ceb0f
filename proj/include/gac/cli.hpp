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

// The `gac` command line: solve, sweep, audit, cost, scatter and demo.
//
// Exit codes: 0 success, 1 usage error, 2 infeasible budget, 3 I/O or input
// file error. Machine-readable outputs go only to --out style paths (written
// atomically); stdout carries human-readable reports.

#ifndef GAC_CLI_HPP
#define GAC_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gac/alignment.hpp"
#include "gac/cost_model.hpp"
#include "gac/importance.hpp"
#include "gac/model_io.hpp"
#include "gac/pipeline.hpp"
#include "gac/presets.hpp"
#include "gac/report.hpp"
#include "gac/sweep.hpp"

namespace gac {

inline constexpr std::string_view kToolVersion = "1.0.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInfeasible = 2,
  kExitIo = 3,
};

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInfeasible: return kExitInfeasible;
    case ErrorKind::kIo:
    case ErrorKind::kParse:
    case ErrorKind::kValidation: return kExitIo;
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kUnsupported: return kExitUsage;
  }
  return kExitUsage;
}

namespace cli_detail {

inline constexpr std::size_t kMaxListed = 8;

inline constexpr const char* kAnalyticBanner =
    "[analytic model, not wall-clock]";

struct Common {
  std::string constraints;
  std::vector<std::string> profiles;
};

inline void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--constraints", c.constraints,
                  "Constraint file (default: built-in A100 table)");
  sub->add_option("--profile", c.profiles,
                  "Measured latency profile; may repeat, one per op");
}

inline ConstraintModel constraints_of(const Common& c) {
  return c.constraints.empty() ? default_constraints()
                               : load_constraints(c.constraints);
}

inline CostOracle oracle_of(const Common& c, const ConstraintModel& cm) {
  CostOracle o = make_oracle(cm);
  for (const auto& p : c.profiles) o.attach(load_profile(p));
  return o;
}

struct SweepFlags {
  int window = 1;
  std::int64_t step = 0;
  bool full_range = false;
  std::int64_t seq = 2048;
};

inline void add_sweep_flags(CLI::App* sub, SweepFlags& f) {
  sub->add_option("--window", f.window, "Aligned steps on each side of d*")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--step", f.step,
                  "Seed spacing (multiple of the alignment; 0 = alignment)")
      ->check(CLI::NonNegativeNumber);
  sub->add_flag("--full-range", f.full_range,
                "Seed every aligned dimension in [d_min, d_full]");
  sub->add_option("--seq", f.seq, "Sequence length for latency queries")
      ->check(CLI::PositiveNumber);
}

inline SweepConfig sweep_config_of(const SweepFlags& f) {
  SweepConfig c;
  c.window = f.window;
  c.step = f.step;
  c.full_range = f.full_range;
  c.seq = f.seq;
  return c;
}

// "NAME=VALUE"
inline std::pair<std::string, std::int64_t> parse_fix(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) {
    fail(ErrorKind::kInvalidArgument, "--fix expects NAME=VALUE, got '" + s + "'");
  }
  try {
    return {s.substr(0, eq), std::stoll(s.substr(eq + 1))};
  } catch (const std::exception&) {
    fail(ErrorKind::kInvalidArgument, "--fix value is not an integer: '" + s + "'");
  }
}

struct SweepRange {
  std::string name;
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::int64_t step = 1;
};

// "NAME=LO:HI[:STEP]"
inline SweepRange parse_sweep(const std::string& s) {
  SweepRange r;
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) {
    fail(ErrorKind::kInvalidArgument, "--sweep expects NAME=LO:HI[:STEP]");
  }
  r.name = s.substr(0, eq);
  std::vector<std::int64_t> parts;
  std::stringstream ss(s.substr(eq + 1));
  std::string tok;
  try {
    while (std::getline(ss, tok, ':')) parts.push_back(std::stoll(tok));
  } catch (const std::exception&) {
    fail(ErrorKind::kInvalidArgument, "--sweep bounds must be integers");
  }
  if (parts.size() < 2 || parts.size() > 3) {
    fail(ErrorKind::kInvalidArgument, "--sweep expects NAME=LO:HI[:STEP]");
  }
  r.lo = parts[0];
  r.hi = parts[1];
  if (parts.size() == 3) r.step = parts[2];
  if (r.lo < 1 || r.hi < r.lo || r.step < 1) {
    fail(ErrorKind::kInvalidArgument, "--sweep needs 1 <= LO <= HI and STEP >= 1");
  }
  return r;
}

// Dimension -> latency rows for one op with every other dimension fixed.
inline std::string cost_curve_csv(ProfileOp op,
                                  const std::vector<std::string>& fixes,
                                  const std::string& sweep,
                                  const CostOracle& oracle) {
  const auto names = dim_names(op);
  std::map<std::string, std::int64_t> fixed;
  for (const auto& f : fixes) fixed.insert(parse_fix(f));
  if (op == ProfileOp::kSdpa) {
    fixed.emplace("B", kSdpaReferenceBSH[0]);
    fixed.emplace("S", kSdpaReferenceBSH[1]);
    fixed.emplace("H", kSdpaReferenceBSH[2]);
  }
  const SweepRange range = parse_sweep(sweep);
  if (std::find(names.begin(), names.end(), range.name) == names.end()) {
    fail(ErrorKind::kInvalidArgument, "'" + range.name + "' is not a " +
                                          std::string(to_string(op)) + " dimension");
  }
  for (const auto& n : names) {
    if (std::string(n) != range.name && !fixed.contains(std::string(n))) {
      fail(ErrorKind::kInvalidArgument,
           "missing --fix " + std::string(n) + "=VALUE");
    }
  }
  if (op == ProfileOp::kSdpa &&
      (fixed["B"] != kSdpaReferenceBSH[0] || fixed["S"] != kSdpaReferenceBSH[1] ||
       fixed["H"] != kSdpaReferenceBSH[2])) {
    fail(ErrorKind::kUnsupported, "SDPA latency is modelled at B=4, S=2048, H=32");
  }
  std::ostringstream out;
  out << std::setprecision(10);
  out << range.name << (op == ProfileOp::kSdpa ? ",latency_ms\n" : ",latency_us\n");
  for (std::int64_t v = range.lo; v <= range.hi; v += range.step) {
    auto dim = [&](std::string_view n) {
      return std::string(n) == range.name ? v : fixed.at(std::string(n));
    };
    double lat = 0.0;
    switch (op) {
      case ProfileOp::kGemm: lat = gemm_latency(dim("M"), dim("N"), dim("K"), oracle); break;
      case ProfileOp::kGemv: lat = gemv_latency(dim("N"), dim("K"), oracle); break;
      case ProfileOp::kSdpa: lat = sdpa_latency(dim("d"), oracle); break;
    }
    out << v << ',' << lat << '\n';
  }
  return out.str();
}

inline void print_budget(std::ostream& out, const PipelineResult& r) {
  const auto& d = r.diagnostics;
  out << "budget: " << r.budget.budget_params << " of " << r.budget.total_full
      << " params (ratio " << r.budget.ratio << ")\n";
  out << "quantization: u = " << d.unit << ", B' = " << d.budget_units
      << " columns (unscaled |W|/u = " << d.unscaled_units << ")\n";
  out << "dp: " << d.dp.rows << " x " << d.dp.cols << " table, " << d.dp.updates
      << " updates, " << std::fixed << std::setprecision(3) << d.solve_ms
      << " ms\n" << std::defaultfloat;
}

}  // namespace cli_detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out,
                   std::ostream& err) {
  using namespace cli_detail;
  CLI::App app{"Alignment-aware dimension allocation for compressed models", "gac"};
  app.set_version_flag("--version",
                       "gac " + std::string(kToolVersion) + " (format_version " +
                           std::string(kFormatVersion) + ")");
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "Baseline, sweep and knapsack in one run");
  std::string model_path, scores_path, out_path, baseline_out, diag_out, cands_out;
  double ratio = 0.15;
  Common solve_common;
  SweepFlags solve_sweep;
  solve->add_option("--model", model_path, "Model spec")->required();
  solve->add_option("--scores", scores_path, "Score file")->required();
  solve->add_option("--ratio", ratio, "Compression ratio in [0, 1)")->required();
  solve->add_option("--out", out_path, "Aligned allocation output")->required();
  solve->add_option("--baseline-out", baseline_out, "Misaligned baseline output");
  solve->add_option("--candidates-out", cands_out, "Candidate sets output");
  solve->add_option("--diag", diag_out, "Diagnostics output");
  add_common(solve, solve_common);
  add_sweep_flags(solve, solve_sweep);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Aligned candidate sets near a baseline");
  std::string baseline_path;
  std::string sweep_scores;
  Common sweep_common;
  SweepFlags sweep_flags;
  sweep->add_option("--model", model_path, "Model spec")->required();
  sweep->add_option("--baseline", baseline_path, "Misaligned baseline allocation")
      ->required();
  sweep->add_option("--scores", sweep_scores, "Score file (admits d=0 for zero scores)");
  sweep->add_option("--out", out_path, "Candidate sets output")->required();
  add_common(sweep, sweep_common);
  add_sweep_flags(sweep, sweep_flags);

  // audit
  auto* audit_cmd = app.add_subcommand("audit", "Alignment report for an allocation");
  std::string alloc_path;
  std::string audit_model;
  Common audit_common;
  audit_cmd->add_option("--alloc", alloc_path, "Allocation file")->required();
  audit_cmd->add_option("--model", audit_model, "Model spec (adds per-role fractions)");
  add_common(audit_cmd, audit_common);

  // cost
  auto* cost = app.add_subcommand("cost", "Latency curve along one dimension");
  std::string op_name;
  std::vector<std::string> fixes;
  std::string sweep_spec;
  Common cost_common;
  cost->add_option("--op", op_name, "gemm | gemv | sdpa")
      ->required()
      ->check(CLI::IsMember({"gemm", "gemv", "sdpa"}));
  cost->add_option("--fix", fixes, "Fixed dimension NAME=VALUE; may repeat");
  cost->add_option("--sweep", sweep_spec, "Swept dimension NAME=LO:HI[:STEP]")
      ->required();
  cost->add_option("--out", out_path, "CSV output")->required();
  add_common(cost, cost_common);

  // scatter
  auto* scatter = app.add_subcommand("scatter", "Per-weight dimension CSV for plots");
  Common scatter_common;
  scatter->add_option("--model", model_path, "Model spec")->required();
  scatter->add_option("--alloc", alloc_path, "Allocation file")->required();
  scatter->add_option("--out", out_path, "CSV output")->required();
  add_common(scatter, scatter_common);

  // demo
  auto* demo = app.add_subcommand("demo", "End-to-end run on a built-in preset");
  std::string preset = "llama3-8b";
  std::uint64_t seed = 0;
  std::int64_t seq = 1024;
  std::string out_dir;
  Common demo_common;
  double demo_ratio = 0.15;
  demo->add_option("--preset", preset, "llama3-8b | uniform100")
      ->check(CLI::IsMember({"llama3-8b", "uniform100"}));
  demo->add_option("--ratio", demo_ratio, "Compression ratio in [0, 1)");
  demo->add_option("--seed", seed, "Synthetic score seed");
  demo->add_option("--seq", seq, "Prefill sequence length")->check(CLI::PositiveNumber);
  demo->add_option("--out-dir", out_dir, "Write all artifacts to this directory");
  add_common(demo, demo_common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*solve) {
      const auto cm = constraints_of(solve_common);
      const auto oracle = oracle_of(solve_common, cm);
      const auto spec = load_model_spec(model_path);
      const auto scores = load_scores(scores_path, spec);
      PipelineOptions opts;
      opts.sweep = sweep_config_of(solve_sweep);
      const auto r = solve_pipeline(spec, scores, ratio, cm, oracle, opts);
      save_allocation(out_path, r.aligned);
      if (!baseline_out.empty()) save_allocation(baseline_out, r.baseline);
      if (!cands_out.empty()) save_candidates(cands_out, r.candidates);
      if (!diag_out.empty()) write_json_atomic(diag_out, to_json(r.diagnostics));
      print_budget(out, r);
      out << "baseline: " << format_report(audit(r.baseline, cm), kMaxListed);
      out << "aligned:  " << format_report(audit(r.aligned, cm));
      out << "aligned total: " << r.aligned.total_params << " params\n";
    } else if (*sweep) {
      const auto cm = constraints_of(sweep_common);
      const auto oracle = oracle_of(sweep_common, cm);
      const auto spec = load_model_spec(model_path);
      const auto baseline = load_allocation(baseline_path);
      std::optional<ScoreSet> scores;
      if (!sweep_scores.empty()) scores = load_scores(sweep_scores, spec);
      const auto sets = sweep_all(spec, baseline, cm, oracle,
                                  sweep_config_of(sweep_flags),
                                  scores ? &*scores : nullptr);
      save_candidates(out_path, sets);
      std::size_t total = 0;
      for (const auto& s : sets) total += s.candidates.size();
      out << sets.size() << " candidate sets, " << total << " candidates\n";
    } else if (*audit_cmd) {
      const auto cm = constraints_of(audit_common);
      const auto alloc = load_allocation(alloc_path);
      std::optional<ModelSpec> spec;
      if (!audit_model.empty()) spec = load_model_spec(audit_model);
      out << format_report(audit(alloc, cm, spec ? &*spec : nullptr));
    } else if (*cost) {
      const auto cm = constraints_of(cost_common);
      const auto oracle = oracle_of(cost_common, cm);
      const auto op = *parse_profile_op(op_name);
      write_file_atomic(out_path, cost_curve_csv(op, fixes, sweep_spec, oracle));
      out << "wrote " << out_path << " " << kAnalyticBanner << "\n";
    } else if (*scatter) {
      const auto cm = constraints_of(scatter_common);
      const auto spec = load_model_spec(model_path);
      const auto alloc = load_allocation(alloc_path);
      export_scatter(spec, alloc, cm, out_path);
      out << format_report(audit(alloc, cm, &spec));
    } else if (*demo) {
      const auto cm = constraints_of(demo_common);
      const auto oracle = oracle_of(demo_common, cm);
      const auto spec = preset_spec(preset);
      const auto scores = synthetic_scores(spec, seed);
      PipelineOptions opts;
      opts.sweep.seq = seq;
      const auto r = solve_pipeline(spec, scores, demo_ratio, cm, oracle, opts);
      const auto full = full_allocation(spec);

      out << "preset " << spec.name << ": " << spec.size() << " weights\n";
      print_budget(out, r);
      std::size_t n_cands = 0;
      for (const auto& s : r.candidates) n_cands += s.candidates.size();
      out << "candidates: " << n_cands << " across " << r.candidates.size()
          << " weights\n";
      out << "baseline: " << format_report(audit(r.baseline, cm), kMaxListed);
      out << "aligned:  " << format_report(audit(r.aligned, cm));
      const double c_full = estimate_model_cost(spec, full, seq, oracle);
      const double c_base = estimate_model_cost(spec, r.baseline, seq, oracle);
      const double c_gac = estimate_model_cost(spec, r.aligned, seq, oracle);
      out << "model cost at S=" << seq << " " << kAnalyticBanner << "\n";
      out << std::fixed << std::setprecision(1);
      out << "  uncompressed: " << c_full << " us\n";
      out << "  baseline:     " << c_base << " us (" << std::showpos
          << 100.0 * (c_base / c_full - 1.0) << "%)\n" << std::noshowpos;
      out << "  aligned:      " << c_gac << " us (" << std::showpos
          << 100.0 * (c_gac / c_full - 1.0) << "%)\n" << std::noshowpos;
      out << std::setprecision(3) << "  speedup aligned vs baseline: "
          << c_base / c_gac << "x\n" << std::defaultfloat;
      if (!out_dir.empty()) {
        const std::filesystem::path dir(out_dir);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) fail(ErrorKind::kIo, "cannot create '" + dir.string() + "'");
        save_model_spec(dir / "model.json", spec);
        save_scores(dir / "scores.json", scores);
        save_allocation(dir / "baseline.json", r.baseline);
        save_candidates(dir / "candidates.json", r.candidates);
        save_allocation(dir / "aligned.json", r.aligned);
        write_json_atomic(dir / "diag.json", to_json(r.diagnostics));
        export_scatter(spec, r.baseline, cm, dir / "baseline_scatter.csv");
        export_scatter(spec, r.aligned, cm, dir / "aligned_scatter.csv");
        out << "artifacts written to " << dir.string() << "\n";
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("gac");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace gac

#endif  // GAC_CLI_HPP
