#pragma once

// Single-threaded reference implementations of the lattice kernels. They use
// the most direct formulation available and are kept for cross-checking the
// OpenMP paths in tests and benchmarks.

#include "cuspsheet/capture_kernel.hpp"
#include "cuspsheet/gaussfields.hpp"
#include "cuspsheet/worldsheet.hpp"

namespace cuspsheet::reference {

// Per-point trapezoid sums from xi = 0 (no shared prefix sums). O(n^3).
WorldSheetGrid reconstruct(const TransportSolution& tPlus, const TransportSolution& tMinus, double kappa,
                           const Vec4& basePoint, const LatticeSpec& lattice);

// Row-by-row sweep of the characteristic lattice instead of anti-diagonals.
GaussFields goursat_solve(const ProfileFunction& rhoPlus, const ProfileFunction& rhoMinus,
                          const GoursatBoundary& boundary, const LatticeSpec& lattice,
                          double threshold = kDefaultSingularThreshold);

// Plain loop over pairs with a scalar Simpson sum.
std::vector<KernelEntry> kernel_table(const std::vector<Vec3>& momenta, const std::vector<Vec3>& momentaPrime,
                                      double t, const WorldSheetGrid& grid, const KernelConfig& config);

}  // namespace cuspsheet::reference
