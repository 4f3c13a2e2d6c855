// Copyright 2026 The pairlab Authors.
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

// Command-line front end: train | eval | gradcheck | ablate | dictsweep | sweep.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pairlab/checkpoint.hpp"
#include "pairlab/error.hpp"
#include "pairlab/experiments.hpp"
#include "pairlab/format.hpp"
#include "pairlab/retrieval_eval.hpp"
#include "pairlab/run_config.hpp"
#include "pairlab/training.hpp"

namespace fs = std::filesystem;
using namespace pairlab;

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kNumerical = 2, kThreshold = 3 };

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "Flat JSON run config");
  cmd->add_option("--seed", opts.seed, "Run seed (overrides the config)");
  cmd->add_option("--out", opts.out, "Output directory (overrides output_dir)");
}

// Returns nullopt after printing errors.
std::optional<RunConfig> resolve_config(const CommonOptions& opts) {
  ConfigParseResult parsed;
  if (!opts.config_path.empty()) {
    parsed = load_run_config(opts.config_path);
  } else {
    parsed.config.sync();
  }
  if (opts.seed) parsed.config.seed = opts.seed;
  if (!opts.out.empty()) parsed.config.output_dir = opts.out;
  parsed.config.sync();
  auto errors = parsed.errors;
  for (auto& e : parsed.config.validate()) errors.push_back(std::move(e));
  if (!errors.empty()) {
    std::cerr << "config validation failed:\n";
    for (const auto& e : errors) std::cerr << "  " << e << '\n';
    return std::nullopt;
  }
  return parsed.config;
}

std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

void print_report(const std::string& label, const EvalReport& r) {
  std::cout << label << ": top1=" << r.top1 << " top5=" << r.top5 << " top10=" << r.top10
            << " mAP=" << r.mean_ap << " (gallery " << r.gallery_size << ", " << r.num_queries << " queries)\n";
}

// Accepts a checkpoint file or a run directory holding network.ckpt.
EmbeddingNetwork load_network(const fs::path& checkpoint) {
  const fs::path file = fs::is_directory(checkpoint) ? checkpoint / "network.ckpt" : checkpoint;
  return EmbeddingNetwork(load_checkpoint(file));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Siamese metric-learning lab: on-line pairing + hard example priority losses"};
  app.require_subcommand(1);

  CommonOptions train_opts, eval_opts, grad_opts, ablate_opts, dict_opts, sweep_opts;
  std::string resume_dir, eval_checkpoint, sweep_checkpoint;

  auto* train = app.add_subcommand("train", "Train one model; writes metrics.csv, progress.csv and checkpoints");
  add_common(train, train_opts);
  train->add_option("--resume", resume_dir, "Directory of a previous run to continue from");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the held-out split; writes eval.csv");
  add_common(eval, eval_opts);
  eval->add_option("--checkpoint", eval_checkpoint, "Network checkpoint or run directory (default <out>/network.ckpt)");

  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference checks of every analytic gradient");
  add_common(gradcheck, grad_opts);

  auto* ablate = app.add_subcommand("ablate", "Train all loss modes; writes ablation.csv");
  add_common(ablate, ablate_opts);

  auto* dictsweep = app.add_subcommand("dictsweep", "Sweep dictionary size; writes dictsweep.csv");
  add_common(dictsweep, dict_opts);

  auto* sweep = app.add_subcommand("sweep", "Gallery-size sweep; writes sweep.csv");
  add_common(sweep, sweep_opts);
  sweep->add_option("--checkpoint", sweep_checkpoint, "Network checkpoint or run directory (trains first when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      auto config = resolve_config(train_opts);
      if (!config) return kValidation;
      std::optional<fs::path> resume;
      if (!resume_dir.empty()) resume = resume_dir;
      const auto summary = train_to_directory(*config, config->output_dir, resume);
      print_report("initial", summary.initial);
      print_report("final", summary.final);
      return kOk;
    }
    if (*eval) {
      auto config = resolve_config(eval_opts);
      if (!config) return kValidation;
      const fs::path out = config->output_dir;
      const fs::path ckpt = eval_checkpoint.empty() ? out / "network.ckpt" : fs::path(eval_checkpoint);
      const EmbeddingNetwork net = load_network(ckpt);
      const IdentityWorld world(config->world);
      const EvalSplit split = heldout_split(*config, world);
      const EvalReport report = evaluate_split(net, split);
      auto csv = open_out(out / "eval.csv");
      write_eval_csv_header(csv);
      write_eval_csv_row(csv, report);
      print_report("eval", report);
      return kOk;
    }
    if (*gradcheck) {
      auto config = resolve_config(grad_opts);
      if (!config) return kValidation;
      bool ok = true;
      for (const auto& suite : run_gradcheck_suites(*config->seed)) {
        const bool pass = suite.max_relative_error < kGradcheckTolerance;
        ok = ok && pass;
        std::cout << (pass ? "PASS " : "FAIL ") << suite.name << " cases=" << suite.cases
                  << " max_rel_err=" << fmt_double(suite.max_relative_error) << '\n';
      }
      return ok ? kOk : kThreshold;
    }
    if (*ablate) {
      auto config = resolve_config(ablate_opts);
      if (!config) return kValidation;
      const fs::path out = config->output_dir;
      const auto rows = run_ablation(*config, out);
      auto csv = open_out(out / "ablation.csv");
      write_ablation_csv(csv, rows);
      for (const auto& row : rows) print_report(std::string(to_string(row.loss_mode)), row.report);
      return kOk;
    }
    if (*dictsweep) {
      auto config = resolve_config(dict_opts);
      if (!config) return kValidation;
      const fs::path out = config->output_dir;
      const auto rows = run_dict_sweep(*config, out);
      auto csv = open_out(out / "dictsweep.csv");
      write_dictsweep_csv(csv, rows);
      for (const auto& row : rows) {
        print_report(std::string(to_string(row.loss_mode)) + " x" + std::to_string(row.multiplier), row.report);
      }
      return kOk;
    }
    if (*sweep) {
      auto config = resolve_config(sweep_opts);
      if (!config) return kValidation;
      const fs::path out = config->output_dir;
      fs::path ckpt = sweep_checkpoint;
      if (ckpt.empty()) {
        train_to_directory(*config, out / "model");
        ckpt = out / "model" / "network.ckpt";
      }
      const EmbeddingNetwork net = load_network(ckpt);
      auto csv = open_out(out / "sweep.csv");
      write_eval_csv_header(csv);
      for (const auto& report : run_gallery_sweep(*config, net)) {
        write_eval_csv_row(csv, report);
        print_report("sweep", report);
      }
      return kOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::kInvalidConfig:
      case ErrorCode::kInvalidArgument:
        return kValidation;
      case ErrorCode::kNumericalFailure:
      case ErrorCode::kZeroVector:
        return kNumerical;
      default:
        return kValidation;
    }
  }
  return kOk;
}
