#pragma once

#include "cuspsheet/common.hpp"
#include "cuspsheet/lattice.hpp"
#include "cuspsheet/transport.hpp"

namespace cuspsheet {

struct GaussFields;

// X(t, s) on the lattice together with the induced-metric coefficient
// d+X . d-X = -kappa^2/2 |t11+ t22- - t12+ t21-|^2.
struct WorldSheetGrid {
  double kappa = 1.0;
  Vec4 basePoint = Vec4::Zero();
  LatticeSpec lattice;
  Field2D<Vec4> X;
  Field2D<double> metric;

  // |combination|^2 = -2 metric / kappa^2, the scale-free cusp indicator.
  double combination_sq(std::size_t i, std::size_t j) const { return -2.0 * metric(i, j) / (kappa * kappa); }
};

struct MetricSample {
  double value = 0.0;  // <= 0
};

struct ConstraintReport {
  double nullPlus = 0.0;   // max |(d+X)^2|
  double nullMinus = 0.0;  // max |(d-X)^2|
  double wave = 0.0;       // max |d+d-X| (Euclidean norm of the 4-vector)
  double step = 0.0;       // effective spacing used by the stencils
  std::size_t points = 0;
};

struct SecondFormSample {
  double modulusPlus = 0.0;
  double modulusMinus = 0.0;
  double phasePlus = 0.0;
  double phaseMinus = 0.0;
  double beta = 0.0;
  double chi = 0.0;
};

// t11+ t22- - t12+ t21-. Equals K11 of K = T+ T-^{-1}.
cplx metric_combination(const Matrix2C& tPlus, const Matrix2C& tMinus);

// X = X0 + kappa (int_0^{s+t} e+ - int_0^{s-t} e-), trapezoid prefix sums on the
// transport grids. The time component is X0_0 + kappa t exactly.
WorldSheetGrid reconstruct(const TransportSolution& tPlus, const TransportSolution& tMinus, double kappa,
                           const Vec4& basePoint, const LatticeSpec& lattice, Exec exec = Exec::parallel);

MetricSample metric_coefficient(const TransportSolution& tPlus, const TransportSolution& tMinus, double kappa,
                                double t, double s);

// Light-cone central differences. stride > 1 evaluates the same stencils on the
// sub-lattice of spacing stride * h.
ConstraintReport constraint_residuals(const WorldSheetGrid& grid, std::size_t stride = 1);

// Coefficient data of II_1 + i II_2 at a lattice point (t, s).
SecondFormSample second_forms(const TransportSolution& tPlus, const TransportSolution& tMinus,
                              const GaussFields& fields, double kappa, double beta, double t, double s);

}  // namespace cuspsheet
