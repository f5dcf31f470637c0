#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cuspsheet/capture_kernel.hpp"
#include "cuspsheet/common.hpp"
#include "cuspsheet/profiles.hpp"

namespace cuspsheet::cli {

// Malformed or inconsistent scenario input (exit code 2).
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  double tMin = 0.0;
  double tMax = 0.0;
  double sMin = -1.0;
  double sMax = 1.0;
  double step = 0.01;
};

struct KernelSpec {
  KernelConfig config;
  double time = 0.0;
  std::vector<Vec3> momenta;
  std::vector<Vec3> momentaPrime;
};

struct Scenario {
  std::string name;
  ChiralProfile rhoPlus;
  ChiralProfile rhoMinus;
  Matrix2C initialPlus = Matrix2C::Identity();
  Matrix2C initialMinus = Matrix2C::Identity();
  double kappa = 1.0;
  Vec4 basePoint = Vec4::Zero();
  GridSpec grid;
  double cuspTol = 1e-10;
  double singularThreshold = 1e-6;
  double beta = 0.0;
  std::optional<KernelSpec> kernel;
  std::filesystem::path outputDir = "out";
  bool eulerTransport = false;  // test hook: non-unitary integrator
  std::string sourceText;       // raw file contents, hashed into the manifest
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace cuspsheet::cli
