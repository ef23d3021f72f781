#include "nepv/driver.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Solvers and experiment driver for eigenvector-dependent "
               "nonlinear eigenvalue problems"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  int jobs = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config file (INI)")->required();
    sub->add_option("--out", out_override, "output directory (overrides config)");
  };

  CLI::App* run = app.add_subcommand("run", "single solve; writes trace.csv and summary.json");
  add_common(run);
  CLI::App* sweep = app.add_subcommand("sweep-alpha", "solve over an alpha grid; writes sweep.csv");
  add_common(sweep);
  sweep->add_option("--jobs", jobs, "concurrent sweep cells")->check(CLI::PositiveNumber);
  CLI::App* single = app.add_subcommand("single-step", "single-step error study; writes single_step.csv");
  add_common(single);
  CLI::App* order = app.add_subcommand("order", "convergence-order estimate; writes order.json");
  add_common(order);

  CLI11_PARSE(app, argc, argv);

  nepv::ExperimentConfig cfg;
  try {
    cfg = nepv::ExperimentConfig::load(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  std::string outdir = out_override.empty() ? cfg.output_dir : out_override;

  try {
    if (run->parsed()) return nepv::cmd_run(cfg, outdir);
    if (sweep->parsed()) return nepv::cmd_sweep_alpha(cfg, outdir, jobs);
    if (single->parsed()) return nepv::cmd_single_step(cfg, outdir);
    if (order->parsed()) return nepv::cmd_order(cfg, outdir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
