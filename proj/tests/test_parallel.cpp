// OpenMP kernels against their serial loops and the reference implementations.

#include <omp.h>

#include <random>

#include "doctest.h"
#include "support.hpp"

using namespace cuspsheet;

namespace {

struct Threads {
  int saved = omp_get_max_threads();
  explicit Threads(int n) { omp_set_num_threads(n); }
  ~Threads() { omp_set_num_threads(saved); }
};

testsupport::Sheet scenario(double h) {
  std::mt19937_64 rng(99);
  const auto pp = testsupport::random_profiles(rng, 2.5);
  const auto l = LatticeSpec::from_ranges(-0.6, 0.6, -1.0, 1.0, h);
  return testsupport::make_sheet(pp.plus, pp.minus, l, random_su2(rng), random_su2(rng), 1.4, Vec4(1, 2, 3, 4));
}

}  // namespace

TEST_CASE("reconstruct") {
  Threads th(4);
  const auto sh = scenario(0.01);
  const auto serial = reconstruct(sh.plus, sh.minus, 1.4, Vec4(1, 2, 3, 4), sh.grid.lattice, Exec::serial);
  CHECK(serial.X.data() == sh.grid.X.data());
  CHECK(serial.metric.data() == sh.grid.metric.data());
  const auto coarse = scenario(0.02);
  const auto ref = reference::reconstruct(coarse.plus, coarse.minus, 1.4, Vec4(1, 2, 3, 4), coarse.grid.lattice);
  for (std::size_t k = 0; k < ref.X.data().size(); ++k) CHECK((ref.X.data()[k] - coarse.grid.X.data()[k]).norm() < 1e-12);
  CHECK(ref.metric.data() == coarse.grid.metric.data());
}

TEST_CASE("Gauss decomposition") {
  Threads th(4);
  const auto sh = scenario(0.01);
  const auto a = decompose_lattice(sh.plus, sh.minus, sh.grid.lattice, kDefaultSingularThreshold, Exec::parallel);
  const auto b = decompose_lattice(sh.plus, sh.minus, sh.grid.lattice, kDefaultSingularThreshold, Exec::serial);
  CHECK(a.phi.data() == b.phi.data());
  CHECK(a.alphaPlus.data() == b.alphaPlus.data());
  CHECK(a.alphaMinus.data() == b.alphaMinus.data());
  CHECK(a.singular.data() == b.singular.data());
  CHECK(a.branchJump.data() == b.branchJump.data());
}

TEST_CASE("cusp detection") {
  Threads th(4);
  const auto sh = scenario(0.01);
  DetectOptions par, ser;
  ser.exec = Exec::serial;
  const auto a = detect(sh.plus, sh.minus, sh.grid, par);
  const auto b = detect(sh.plus, sh.minus, sh.grid, ser);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].kind == b[k].kind);
    CHECK(a[k].t == b[k].t);
    CHECK(a[k].s == b[k].s);
    CHECK(a[k].residual == b[k].residual);
  }
}

TEST_CASE("Goursat wavefront") {
  Threads th(4);
  std::mt19937_64 rng(5);
  const auto pp = testsupport::random_profiles(rng, 0.8);
  const auto l = LatticeSpec::from_ranges(-0.4, 0.4, -0.4, 0.4, 0.002);
  const auto sh = testsupport::make_sheet(pp.plus, pp.minus, l);
  const auto bd = boundary_from_transport(sh.plus, sh.minus, l);
  const auto a = goursat_solve(as_function(pp.plus), as_function(pp.minus), bd, l);
  const auto b = reference::goursat_solve(as_function(pp.plus), as_function(pp.minus), bd, l);
  CHECK(a.phi.data() == b.phi.data());
  CHECK(a.alphaPlus.data() == b.alphaPlus.data());
  CHECK(a.alphaMinus.data() == b.alphaMinus.data());
}

TEST_CASE("kernel table") {
  Threads th(4);
  const auto sh = testsupport::make_sheet(make_bump(0, 2, cplx(0.5, 0.5)), make_bump(0.5, 2, 0.7),
                                          LatticeSpec::from_ranges(0, 0, -3, 3, 0.005));
  KernelConfig c;
  c.cutoffScale = 0.2;
  c.plateauHalfWidth = 2.0;
  c.tailWidth = 0.5;
  std::vector<Vec3> ps;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int k = 0; k < 12; ++k) ps.emplace_back(u(rng), u(rng), u(rng));
  const auto a = kernel_table(ps, ps, 0.0, sh.grid, c, Exec::parallel);
  const auto b = kernel_table(ps, ps, 0.0, sh.grid, c, Exec::serial);
  const auto r = reference::kernel_table(ps, ps, 0.0, sh.grid, c);
  REQUIRE(a.size() == r.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].value == b[k].value);
    CHECK(std::abs(a[k].value - r[k].value) <= 1e-13);
  }
}
