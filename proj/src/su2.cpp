#include "cuspsheet/su2.hpp"

#include <cmath>

namespace cuspsheet {

Matrix2C q_matrix(cplx rho, Chirality chirality) {
  Matrix2C q;
  if (chirality == Chirality::plus) {
    q << cplx{}, -rho, std::conj(rho), cplx{};
  } else {
    q << cplx{}, std::conj(rho), -rho, cplx{};
  }
  return q;
}

Matrix2C transport_step(cplx rho, double h, Chirality chirality) {
  const double r = std::abs(rho);
  if (r == 0.0) return Matrix2C::Identity();
  const double angle = h * r;
  Matrix2C m = -(std::sin(angle) / r) * q_matrix(rho, chirality);
  m(0, 0) += std::cos(angle);
  m(1, 1) += std::cos(angle);
  return m;
}

double unitarity_defect(const Matrix2C& t) { return (t.adjoint() * t - Matrix2C::Identity()).norm(); }

double determinant_defect(const Matrix2C& t) { return std::abs(t.determinant() - cplx{1.0, 0.0}); }

bool is_su2(const Matrix2C& t, double tol) { return unitarity_defect(t) <= tol && determinant_defect(t) <= tol; }

Matrix2C sl2_inverse(const Matrix2C& t) {
  Matrix2C inv;
  inv << t(1, 1), -t(0, 1), -t(1, 0), t(0, 0);
  return inv;
}

Matrix2C minus_i_sigma2() {
  Matrix2C m;
  m << 0.0, -1.0, 1.0, 0.0;
  return m;
}

Matrix2C random_su2(std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  double q[4];
  double n = 0.0;
  do {
    n = 0.0;
    for (double& v : q) {
      v = normal(rng);
      n += v * v;
    }
  } while (n < 1e-12);
  n = std::sqrt(n);
  const cplx a{q[0] / n, q[1] / n};
  const cplx b{q[2] / n, q[3] / n};
  Matrix2C m;
  m << a, b, -std::conj(b), std::conj(a);
  return m;
}

}  // namespace cuspsheet
