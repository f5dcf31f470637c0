#include "cuspsheet/reference.hpp"

#include <stdexcept>

namespace cuspsheet {

namespace detail {
GaussFields goursat_solve_rows(const ProfileFunction& rhoPlus, const ProfileFunction& rhoMinus,
                               const GoursatBoundary& boundary, const LatticeSpec& lattice, double threshold);
}

namespace reference {

namespace {

// int_0^{k h} n(xi) dxi by the trapezoid rule, summed from scratch.
Vec3 frame_integral(const TransportSolution& ts, long k) {
  Vec3 sum = Vec3::Zero();
  const long dir = k >= 0 ? 1 : -1;
  for (long m = 0; m != k; m += dir) {
    const Vec3 a = null_vector(ts.at_index(m), ts.chirality()).spatial();
    const Vec3 b = null_vector(ts.at_index(m + dir), ts.chirality()).spatial();
    sum += static_cast<double>(dir) * 0.5 * ts.step() * (a + b);
  }
  return sum;
}

}  // namespace

WorldSheetGrid reconstruct(const TransportSolution& tPlus, const TransportSolution& tMinus, double kappa,
                           const Vec4& basePoint, const LatticeSpec& lattice) {
  if (!tPlus.covers_index(lattice.plus_min()) || !tPlus.covers_index(lattice.plus_max()) ||
      !tMinus.covers_index(lattice.minus_min()) || !tMinus.covers_index(lattice.minus_max())) {
    throw std::out_of_range("reference::reconstruct: insufficient xi coverage");
  }
  WorldSheetGrid grid;
  grid.kappa = kappa;
  grid.basePoint = basePoint;
  grid.lattice = lattice;
  grid.X = Field2D<Vec4>(lattice.nt(), lattice.ns(), Vec4::Zero());
  grid.metric = Field2D<double>(lattice.nt(), lattice.ns(), 0.0);
  for (std::size_t i = 0; i < lattice.nt(); ++i) {
    for (std::size_t j = 0; j < lattice.ns(); ++j) {
      const long kp = lattice.plus_index(i, j);
      const long km = lattice.minus_index(i, j);
      const Vec3 x = kappa * (frame_integral(tPlus, kp) - frame_integral(tMinus, km));
      Vec4 X;
      X << basePoint(0) + kappa * lattice.t(i), basePoint.tail<3>() + x;
      grid.X(i, j) = X;
      const cplx c = metric_combination(tPlus.at_index(kp), tMinus.at_index(km));
      grid.metric(i, j) = -0.5 * kappa * kappa * std::norm(c);
    }
  }
  return grid;
}

GaussFields goursat_solve(const ProfileFunction& rhoPlus, const ProfileFunction& rhoMinus,
                          const GoursatBoundary& boundary, const LatticeSpec& lattice, double threshold) {
  return detail::goursat_solve_rows(rhoPlus, rhoMinus, boundary, lattice, threshold);
}

std::vector<KernelEntry> kernel_table(const std::vector<Vec3>& momenta, const std::vector<Vec3>& momentaPrime,
                                      double t, const WorldSheetGrid& grid, const KernelConfig& config) {
  std::vector<KernelEntry> out;
  out.reserve(momenta.size() * momentaPrime.size());
  for (const Vec3& p : momenta) {
    for (const Vec3& pp : momentaPrime) out.push_back({p, pp, kernel(p, pp, t, grid, config)});
  }
  return out;
}

}  // namespace reference
}  // namespace cuspsheet
