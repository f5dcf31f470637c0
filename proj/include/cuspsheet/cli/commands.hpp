#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cuspsheet/cli/scenario.hpp"
#include "cuspsheet/cusps.hpp"
#include "cuspsheet/transport.hpp"
#include "cuspsheet/worldsheet.hpp"

namespace cuspsheet::cli {

enum class Command { simulate, cusps, verify, kernel, all };

struct RunOptions {
  std::filesystem::path scenario;
  std::optional<std::filesystem::path> out;
  std::optional<double> step;
  std::optional<double> tol;
  std::optional<int> threads;
};

// Exit codes: 0 ok, 1 verification failure, 2 bad input, 3 internal error.
int run_command(Command command, const RunOptions& options, std::ostream& log);

struct Simulation {
  Scenario scenario;
  LatticeSpec lattice;
  TransportSolution plus;
  TransportSolution minus;
  WorldSheetGrid grid;
};

Simulation simulate(const Scenario& scenario);

enum class Status { pass, fail, skip };

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  Status status = Status::pass;
  std::string note;
};

std::vector<Check> verify_checks(const Simulation& sim);

}  // namespace cuspsheet::cli
