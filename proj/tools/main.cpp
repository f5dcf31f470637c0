#include <CLI11.hpp>
#include <iostream>

#include "cuspsheet/cli/commands.hpp"

using cuspsheet::cli::Command;

int main(int argc, char** argv) {
  CLI::App app{"cuspsheet: string world-sheets from SU(2) transport, cusp detection and capture kernels"};
  app.require_subcommand(1);

  cuspsheet::cli::RunOptions opts;
  double step = 0.0;
  double tol = 0.0;
  int threads = 0;

  const std::pair<const char*, const char*> subs[] = {
      {"simulate", "reconstruct the world-sheet; write worldsheet.csv, metric.csv, metadata.json"},
      {"cusps", "detect cusps; write cusps.json"},
      {"verify", "run invariant checks; write verify.json and fields.csv (exit 1 on FAIL)"},
      {"kernel", "evaluate the capture kernel table; write kernel.csv"},
      {"all", "everything above"}};
  std::vector<CLI::App*> apps;
  for (const auto& [name, help] : subs) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--scenario", opts.scenario, "scenario JSON file")->required();
    sub->add_option("--out", opts.out, "output directory (overrides output_dir)");
    sub->add_option("--step", step, "lattice step h (overrides grid.step)");
    sub->add_option("--tol", tol, "cusp tolerance on |combination|^2 (overrides cusp_tol)");
    sub->add_option("--threads", threads, "OpenMP thread count");
    apps.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  for (CLI::App* sub : apps) {
    if (sub->count("--step")) opts.step = step;
    if (sub->count("--tol")) opts.tol = tol;
    if (sub->count("--threads")) opts.threads = threads;
  }

  static const Command commands[] = {Command::simulate, Command::cusps, Command::verify, Command::kernel, Command::all};
  for (std::size_t k = 0; k < apps.size(); ++k) {
    if (apps[k]->parsed()) return cuspsheet::cli::run_command(commands[k], opts, std::cerr);
  }
  return 2;
}
