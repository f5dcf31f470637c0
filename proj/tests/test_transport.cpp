#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"

using namespace cuspsheet;
using testsupport::expm_taylor;
using testsupport::max_abs_diff;
using testsupport::rotation;

namespace {

Matrix2C m(cplx a, cplx b, cplx c, cplx d) {
  Matrix2C r;
  r << a, b, c, d;
  return r;
}

const cplx I{0.0, 1.0};

}  // namespace

TEST_CASE("connection matrices for both chiralities") {
  CHECK(q_matrix(0.0, Chirality::plus) == Matrix2C::Zero());
  CHECK(q_matrix(1.0, Chirality::plus) == m(0, -1, 1, 0));
  CHECK(q_matrix(I, Chirality::plus) == m(0, -I, -I, 0));
  CHECK(q_matrix(1.0, Chirality::minus) == m(0, 1, -1, 0));
  CHECK(q_matrix(I, Chirality::minus) == m(0, -I, -I, 0));

  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  for (int k = 0; k < 50; ++k) {
    const cplx rho(n(rng), n(rng));
    for (auto c : {Chirality::plus, Chirality::minus}) {
      const Matrix2C q = q_matrix(rho, c);
      CHECK(max_abs_diff(q.adjoint(), -q) == 0.0);
      CHECK(q.trace() == cplx(0.0, 0.0));
    }
  }
}

TEST_CASE("closed-form step matches a Taylor matrix exponential") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> hd(1e-4, 0.5);
  for (int k = 0; k < 200; ++k) {
    const cplx rho(3.0 * n(rng), 3.0 * n(rng));
    const double h = hd(rng);
    for (auto c : {Chirality::plus, Chirality::minus}) {
      const Matrix2C want = expm_taylor(-h * q_matrix(rho, c));
      CHECK(max_abs_diff(transport_step(rho, h, c), want) < 1e-14);
    }
  }
  CHECK(transport_step(0.0, 0.3, Chirality::plus) == Matrix2C::Identity());
}

TEST_CASE("SU(2) helpers") {
  CHECK(is_su2(Matrix2C::Identity()));
  CHECK(is_su2(minus_i_sigma2()));
  CHECK(minus_i_sigma2() == m(0, -1, 1, 0));
  CHECK(!is_su2(2.0 * Matrix2C::Identity()));
  CHECK(!is_su2(m(1, 1, 0, 1)));
  std::mt19937_64 rng(3);
  for (int k = 0; k < 100; ++k) {
    const Matrix2C u = random_su2(rng);
    CHECK(unitarity_defect(u) < 1e-14);
    CHECK(determinant_defect(u) < 1e-14);
    CHECK(max_abs_diff(sl2_inverse(u) * u, Matrix2C::Identity()) < 1e-14);
  }
  const Matrix2C a = m(2, 1, 1, 1);
  CHECK(sl2_inverse(a) == m(1, -1, -1, 2));
}

TEST_CASE("vanishing profile leaves the frame at its initial value") {
  std::mt19937_64 rng(9);
  const Matrix2C u = random_su2(rng);
  const auto sol = integrate_transport(ChiralProfile{}, Chirality::plus, -1.0, 1.0, 0.01, u);
  for (const auto& t : sol.samples()) CHECK(t == u);
}

TEST_CASE("grid contains the origin and anchors the initial value there") {
  const auto p = make_bump(0.5, 0.8, cplx(1.0, 0.4));
  const auto sol = integrate_transport(p, Chirality::minus, 0.3, 1.7, 0.01, minus_i_sigma2());
  CHECK(sol.first_index() <= 0);
  CHECK(sol.at_index(0) == minus_i_sigma2());
  CHECK(sol.grid_end() >= 1.7 - 1e-12);
  CHECK(sol.covers(0.0, 1.7));
  CHECK(!sol.covers(-0.1, 1.0));
  CHECK_THROWS_AS(sol.at_index(sol.last_index() + 1), std::out_of_range);
  CHECK_THROWS_AS(sol.evaluate(5.0), std::out_of_range);
}

TEST_CASE("bad inputs are rejected") {
  const auto p = make_bump(0.0, 1.0, 1.0);
  CHECK_THROWS_AS(integrate_transport(p, Chirality::plus, -1, 1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(integrate_transport(p, Chirality::plus, 1, -1, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(integrate_transport(p, Chirality::plus, -1, 1, 0.01, 2.0 * Matrix2C::Identity()),
                  std::invalid_argument);
}

TEST_CASE("real profile: frame is a rotation by the integrated profile") {
  // Q(xi) all commute when rho is real, so T(xi) = R(+-theta(xi)) T(0) with
  // theta = int_0^xi rho.
  const auto p = make_bump(0.2, 0.9, 1.7) + make_bump(-0.5, 0.6, -0.8);
  for (auto c : {Chirality::plus, Chirality::minus}) {
    const double sign = c == Chirality::plus ? 1.0 : -1.0;
    double prev = 0.0;
    for (double h : {0.02, 0.01, 0.005}) {
      const auto sol = integrate_transport(p, c, -1.2, 1.2, h);
      double err = 0.0;
      for (long k = sol.first_index(); k <= sol.last_index(); k += 1) {
        const double xi = sol.xi(k);
        const double theta = testsupport::simpson([&](double x) { return p(x).real(); }, 0.0, xi, 4000);
        err = std::max(err, max_abs_diff(sol.at_index(k), rotation(sign * theta)));
      }
      if (prev > 0.0) CHECK(testsupport::order(prev, err) == doctest::Approx(2.0).epsilon(0.1));
      prev = err;
    }
  }
}

TEST_CASE("constant real rho over n steps is a rotation by c L") {
  const double c = 1.3, h = 0.01;
  Matrix2C t = Matrix2C::Identity();
  for (int k = 0; k < 250; ++k) t = transport_step(c, h, Chirality::plus) * t;
  CHECK(max_abs_diff(t, rotation(c * 2.5)) < 1e-13);
}

TEST_CASE("unitarity and determinant hold at every sample") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const auto pp = testsupport::random_profiles(rng, 3.0);
    for (auto c : {Chirality::plus, Chirality::minus}) {
      const auto sol = integrate_transport(c == Chirality::plus ? pp.plus : pp.minus, c, -1.5, 1.5, 0.01,
                                           random_su2(rng));
      for (const auto& t : sol.samples()) {
        CHECK(unitarity_defect(t) <= 1e-12);
        CHECK(determinant_defect(t) <= 1e-12);
      }
    }
  }
}

TEST_CASE("terminal matrix converges at second order") {
  const auto p = make_bump(0.1, 0.8, cplx(1.5, -2.0)) + make_bump(0.6, 0.5, cplx(-1.0, 0.7));
  const auto ref = integrate_transport(p, Chirality::plus, 0.0, 1.0, 1e-3 / 16.0);
  const Matrix2C want = ref.at_index(ref.last_index());
  std::vector<double> errs;
  for (double h : {0.02, 0.01, 0.005}) {
    const auto sol = integrate_transport(p, Chirality::plus, 0.0, 1.0, h);
    errs.push_back(max_abs_diff(sol.at_index(sol.last_index()), want));
  }
  CHECK(testsupport::order(errs[0], errs[1]) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(testsupport::order(errs[1], errs[2]) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("off-grid evaluation and derivative") {
  const auto p = make_bump(0.0, 1.0, cplx(0.8, 0.6));
  const auto coarse = integrate_transport(p, Chirality::plus, -1.0, 1.0, 0.01);
  const auto fine = integrate_transport(p, Chirality::plus, -1.0, 1.0, 0.0005);
  // 0.3135 is a multiple of 0.0005
  CHECK(max_abs_diff(coarse.evaluate(0.3135), fine.at_index(627)) < 1e-4);
  CHECK(coarse.evaluate(0.31) == coarse.at_index(31));
  const double d = 1e-5;
  const Matrix2C fd = (fine.evaluate(0.4 + d) - fine.evaluate(0.4 - d)) / (2 * d);
  CHECK(max_abs_diff(fine.derivative(0.4), fd) < 1e-5);
}

TEST_CASE("gap freezes the frame") {
  const auto pair = make_gapped_pair(1.0, 1.0);
  const auto sol = integrate_transport(pair.plus, Chirality::plus, -2.5, 2.5, 0.01, minus_i_sigma2());
  for (long k = -100; k <= 100; ++k) CHECK(sol.at_index(k) == minus_i_sigma2());
  CHECK(max_abs_diff(sol.at_index(150), minus_i_sigma2()) > 0.1);
}

TEST_CASE("null vector examples") {
  const NullVector e1 = null_vector(Matrix2C::Identity(), Chirality::plus);
  CHECK(e1.as_vec4() == Vec4(0.5, 0, 0, -0.5));
  const NullVector e2 = null_vector(Matrix2C::Identity(), Chirality::minus);
  CHECK(e2.as_vec4() == Vec4(0.5, 0, 0, 0.5));
  const NullVector e3 = null_vector(minus_i_sigma2(), Chirality::minus);
  CHECK(e3.as_vec4() == Vec4(0.5, 0, 0, -0.5));
  const double r = std::sqrt(0.5);
  const NullVector e4 = null_vector(m(r, r, -r, r), Chirality::plus);
  CHECK(e4.x1 == doctest::Approx(-0.5));
  CHECK(std::abs(e4.x2) < 1e-16);
  CHECK(std::abs(e4.x3) < 1e-16);
  const NullVector e5 = null_vector(m(r, I * r, I * r, r), Chirality::plus);
  CHECK(std::abs(e5.x1) < 1e-16);
  CHECK(e5.x2 == doctest::Approx(0.5));

  std::mt19937_64 rng(77);
  for (int k = 0; k < 500; ++k) {
    const Matrix2C u = random_su2(rng);
    for (auto c : {Chirality::plus, Chirality::minus}) {
      const NullVector e = null_vector(u, c);
      CHECK(e.x0 == 0.5);
      CHECK(std::abs(e.minkowski_norm()) <= 1e-15);
    }
  }
}

TEST_CASE("right multiplication by a constant SU(2) matrix rotates the frame rigidly") {
  std::mt19937_64 rng(123);
  const auto pp = testsupport::random_profiles(rng, 2.0);
  const Matrix2C b = random_su2(rng);
  const auto a = integrate_transport(pp.plus, Chirality::plus, -1.0, 1.0, 0.01);
  const auto ab = integrate_transport(pp.plus, Chirality::plus, -1.0, 1.0, 0.01, b);
  Eigen::MatrixXd src(3, a.samples().size()), dst(3, a.samples().size());
  for (std::size_t k = 0; k < a.samples().size(); ++k) {
    CHECK(max_abs_diff(ab.samples()[k], a.samples()[k] * b) < 1e-13);
    src.col(k) = null_vector(a.samples()[k], Chirality::plus).spatial();
    dst.col(k) = null_vector(ab.samples()[k], Chirality::plus).spatial();
  }
  // best rotation mapping src onto dst (Kabsch)
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(dst * src.transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix3d rot = svd.matrixU() * svd.matrixV().transpose();
  CHECK((rot.transpose() * rot - Eigen::Matrix3d::Identity()).norm() < 1e-12);
  CHECK((rot * src - dst).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("explicit Euler control drifts off SU(2)") {
  const auto p = make_bump(0.0, 1.0, cplx(2.0, 1.0));
  const auto sol = integrate_transport(p, Chirality::plus, -1.0, 1.0, 0.01, Matrix2C::Identity(),
                                       StepScheme::explicit_euler);
  double worst = 0.0;
  for (const auto& t : sol.samples()) worst = std::max(worst, unitarity_defect(t));
  CHECK(worst > 1e-4);
}
