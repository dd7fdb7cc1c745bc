#pragma once

#include <string>
#include <vector>

#include "edi/dataio.hpp"
#include "edi/eval.hpp"

namespace edi {

// Batch entry points behind the CLI subcommands. All of them throw
// InputError / NumericError; the CLI maps those to exit codes 2 / 1.

// Write a simulated dataset: imu.csv, keyframes.txt, groundtruth.txt,
// sim_truth.json and a config snapshot.
void cmd_simulate(const PipelineConfig& cfg, const std::string& out_dir);

// Run steps 1-3 on a dataset directory. Writes solution.json (numeric
// estimate, byte-deterministic), timing.json (wall-clock stage timings),
// a config snapshot and manifest.json with input digests.
void cmd_init(const std::string& dataset_dir, const PipelineConfig& cfg,
              const std::string& out_dir);

// Score a solution against ground truth. Writes report.json + report.csv.
void cmd_eval(const std::string& solution_path, const std::string& truth_dir,
              const std::string& out_dir);

// Batch evaluation: every direct subdirectory of `parent` holding a
// solution.json and ground truth is scored; one CSV row per run plus a
// median row.
void cmd_eval_batch(const std::string& parent, const std::string& out_csv);

// Cross product of the configured sweep axes (rotation noise x window x
// seed), executed on a worker pool, one CSV row per cell plus per-group
// median rows. Deterministic ordering by cell index.
void cmd_sweep(const PipelineConfig& cfg, const std::string& out_dir, int jobs);

// Named experiment presets adjusting a base config.
PipelineConfig apply_preset(PipelineConfig cfg, const std::string& preset);

// In-memory single-cell experiment used by sweep and the acceptance suite:
// simulate with the config's seed/noise, run the pipeline, score against the
// simulated truth. Timing fields are filled from the run.
EvalReport run_cell(const PipelineConfig& cfg);

}  // namespace edi
