#pragma once

#include <span>
#include <vector>

#include "cuspsheet/common.hpp"
#include "cuspsheet/profiles.hpp"
#include "cuspsheet/su2.hpp"

namespace cuspsheet {

// Light-like frame vector with time component 1/2; the scale kappa is kept apart.
struct NullVector {
  double x0 = 0.5;
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;

  Vec4 as_vec4() const { return {x0, x1, x2, x3}; }
  Vec3 spatial() const { return {x1, x2, x3}; }
  double minkowski_norm() const { return x0 * x0 - x1 * x1 - x2 * x2 - x3 * x3; }
};

enum class StepScheme {
  magnus_midpoint,
  // Non-structure-preserving first-order step. Exists only as a negative control.
  explicit_euler,
};

// Samples of T(xi) on the grid xi_k = k * step, k in [firstIndex, lastIndex].
// The grid always contains xi = 0, where T equals the initial matrix.
class TransportSolution {
 public:
  TransportSolution(Chirality chirality, double step, long firstIndex, std::vector<Matrix2C> samples,
                    Matrix2C initial, ChiralProfile profile);

  Chirality chirality() const { return chirality_; }
  double step() const { return step_; }
  long first_index() const { return first_; }
  long last_index() const { return first_ + static_cast<long>(samples_.size()) - 1; }
  double grid_start() const { return static_cast<double>(first_) * step_; }
  double grid_end() const { return static_cast<double>(last_index()) * step_; }
  double xi(long k) const { return static_cast<double>(k) * step_; }

  const Matrix2C& at_index(long k) const;
  const Matrix2C& initial() const { return initial_; }
  std::span<const Matrix2C> samples() const { return samples_; }
  const ChiralProfile& profile() const { return profile_; }

  bool covers_index(long k) const { return k >= first_ && k <= last_index(); }
  bool covers(double lo, double hi) const;

  // T at an arbitrary xi inside the grid: Magnus sub-steps from the nearest sample.
  Matrix2C evaluate(double xi) const;
  // dT/dxi = -Q(xi) T(xi).
  Matrix2C derivative(double xi) const;

 private:
  Chirality chirality_;
  double step_;
  long first_;
  std::vector<Matrix2C> samples_;
  Matrix2C initial_;
  ChiralProfile profile_;
};

// Integrates T' + Q T = 0 outward from T(0) = initial over a grid that covers
// [xiMin, xiMax] (rounded outward to multiples of step, extended to include 0).
TransportSolution integrate_transport(const ChiralProfile& profile, Chirality chirality, double xiMin,
                                      double xiMax, double step, const Matrix2C& initial = Matrix2C::Identity(),
                                      StepScheme scheme = StepScheme::magnus_midpoint);

// Frame vector from row i = 1 (plus) or i = 2 (minus) of T:
//   (1/2, -Re(t_i1 conj t_i2), -Im(t_i1 conj t_i2), (|t_i2|^2 - |t_i1|^2)/2).
NullVector null_vector(const Matrix2C& t, Chirality chirality);

}  // namespace cuspsheet
