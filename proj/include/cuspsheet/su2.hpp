#pragma once

#include <random>

#include "cuspsheet/common.hpp"

namespace cuspsheet {

// Gauge-fixed connection for one chirality:
//   plus:  Q = -rho sigma_+ + conj(rho) sigma_-  = [[0, -rho], [conj(rho), 0]]
//   minus: Q = -rho sigma_- + conj(rho) sigma_+  = [[0, conj(rho)], [-rho, 0]]
// Both are anti-Hermitian and traceless.
Matrix2C q_matrix(cplx rho, Chirality chirality = Chirality::plus);

// exp(-h Q(rho)) in closed form. Q^2 = -|rho|^2 I, so
// exp(-hQ) = cos(h|rho|) I - sin(h|rho|)/|rho| Q.
Matrix2C transport_step(cplx rho, double h, Chirality chirality);

// Frobenius norm of T^H T - I.
double unitarity_defect(const Matrix2C& t);
double determinant_defect(const Matrix2C& t);
bool is_su2(const Matrix2C& t, double tol = 1e-10);

// Inverse of a unit-determinant 2x2 matrix, [[d, -b], [-c, a]].
Matrix2C sl2_inverse(const Matrix2C& t);

// -i sigma_2 = [[0, -1], [1, 0]]; maps the plus frame onto the minus frame.
Matrix2C minus_i_sigma2();

// Haar-distributed element of SU(2) (unit quaternion from four normals).
Matrix2C random_su2(std::mt19937_64& rng);

}  // namespace cuspsheet
