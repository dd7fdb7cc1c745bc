#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "edi/commands.hpp"
#include "edi/dataio.hpp"
#include "edi/errors.hpp"

namespace {

struct CommonOpts {
  std::string config;
  std::string out = ".";
  std::string preset;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
  sub->add_option("--config", opts.config, "config file (key = value schema)");
  sub->add_option("--out", opts.out, "output directory");
  sub->add_option("--preset", opts.preset,
                  "experiment preset: exact, table3, table5");
  sub->add_option("--seed", opts.seed, "override the simulator seed")
      ->each([&opts](const std::string&) { opts.seed_given = true; });
}

edi::PipelineConfig resolve_config(const CommonOpts& opts) {
  edi::PipelineConfig cfg =
      opts.config.empty() ? edi::PipelineConfig{} : edi::load_config(opts.config);
  if (!opts.preset.empty()) cfg = edi::apply_preset(cfg, opts.preset);
  if (opts.seed_given) cfg.sim.seed = opts.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "EDI visual-inertial initialization: simulate datasets, run the "
      "three-step pipeline, evaluate and sweep experiments.\n"
      "Set EDI_LOG=quiet to suppress warnings."};
  app.require_subcommand(1);

  CommonOpts sim_opts, init_opts, eval_opts, sweep_opts;
  std::string init_data, eval_solution, eval_truth, eval_batch;
  int sweep_jobs = 0;

  auto* sim = app.add_subcommand("simulate", "write a simulated dataset");
  add_common(sim, sim_opts);

  auto* init = app.add_subcommand("init", "run steps 1-3 on a dataset");
  add_common(init, init_opts);
  init->add_option("--data", init_data, "dataset directory (imu.csv, keyframes.txt)")
      ->required();

  auto* eval = app.add_subcommand("eval", "score a solution against ground truth");
  add_common(eval, eval_opts);
  eval->add_option("--solution", eval_solution, "solution.json path");
  eval->add_option("--truth", eval_truth,
                   "directory with groundtruth.txt (+ sim_truth.json)");
  eval->add_option("--batch", eval_batch,
                   "score every run directory under this parent instead");

  auto* sweep = app.add_subcommand("sweep", "run the configured experiment grid");
  add_common(sweep, sweep_opts);
  sweep->add_option("--jobs", sweep_jobs, "worker threads (default: hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) {
      edi::cmd_simulate(resolve_config(sim_opts), sim_opts.out);
    } else if (init->parsed()) {
      edi::cmd_init(init_data, resolve_config(init_opts), init_opts.out);
    } else if (eval->parsed()) {
      if (!eval_batch.empty()) {
        edi::cmd_eval_batch(eval_batch, eval_opts.out + "/batch.csv");
      } else {
        if (eval_solution.empty() || eval_truth.empty()) {
          throw edi::InputError("eval: --solution and --truth are required "
                                "(or use --batch)");
        }
        edi::cmd_eval(eval_solution, eval_truth, eval_opts.out);
      }
    } else if (sweep->parsed()) {
      edi::cmd_sweep(resolve_config(sweep_opts), sweep_opts.out, sweep_jobs);
    }
  } catch (const edi::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const edi::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
