#pragma once

#include <vector>

#include "cuspsheet/common.hpp"
#include "cuspsheet/worldsheet.hpp"

namespace cuspsheet {

struct KernelConfig {
  double epsilon = -1.0;           // coupling, < 0
  double cutoffScale = 0.5;        // a: momenta with |p| > 1/a are cut off
  double plateauHalfWidth = 2.0;   // R: g == 1 on [-R, R]
  double tailWidth = 0.5;          // g falls smoothly to 0 on R < |s| < R + tailWidth

  void validate() const;
  double form_factor(double s) const;
  bool in_cutoff(const Vec3& p) const { return p.norm() <= 1.0 / cutoffScale; }
};

// eps chi(p) chi(p') int exp(-i (p - p') . x(t, s)) g(s) ds by composite Simpson
// over the s row of the lattice at time t.
cplx kernel(const Vec3& p, const Vec3& pPrime, double t, const WorldSheetGrid& grid, const KernelConfig& config);

struct KernelEntry {
  Vec3 p;
  Vec3 pPrime;
  cplx value;
};

// All (p, p') pairs, row-major in p.
std::vector<KernelEntry> kernel_table(const std::vector<Vec3>& momenta, const std::vector<Vec3>& momentaPrime,
                                      double t, const WorldSheetGrid& grid, const KernelConfig& config,
                                      Exec exec = Exec::parallel);

}  // namespace cuspsheet
