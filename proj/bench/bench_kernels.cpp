// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS set to compare scaling.
#include <benchmark/benchmark.h>

#include "cuspsheet/gaussfields.hpp"
#include "cuspsheet/reference.hpp"
#include "cuspsheet/worldsheet.hpp"

using namespace cuspsheet;

namespace {

struct Setup {
  LatticeSpec lattice;
  ChiralProfile rhoPlus{{{0.3, 1.0, {0.8, 0.3}}, {-0.5, 0.7, {0.2, -0.4}}}};
  ChiralProfile rhoMinus{{{0.1, 0.9, {0.5, 0.5}}}};
  TransportSolution plus;
  TransportSolution minus;

  explicit Setup(double h)
      : lattice(LatticeSpec::from_ranges(-0.5, 0.5, -0.5, 0.5, h)),
        plus(integrate_transport(rhoPlus, Chirality::plus, -1.0, 1.0, h)),
        minus(integrate_transport(rhoMinus, Chirality::minus, -1.0, 1.0, h)) {}
};

const Setup& setup() {
  static const Setup s(0.005);
  return s;
}

void BM_reconstruct_parallel(benchmark::State& state) {
  const Setup& s = setup();
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct(s.plus, s.minus, 1.0, Vec4::Zero(), s.lattice));
}

void BM_reconstruct_serial(benchmark::State& state) {
  const Setup& s = setup();
  for (auto _ : state) {
    benchmark::DoNotOptimize(reconstruct(s.plus, s.minus, 1.0, Vec4::Zero(), s.lattice, Exec::serial));
  }
}

void BM_reconstruct_reference(benchmark::State& state) {
  static const Setup s(0.02);
  for (auto _ : state) benchmark::DoNotOptimize(reference::reconstruct(s.plus, s.minus, 1.0, Vec4::Zero(), s.lattice));
}

void BM_decompose(benchmark::State& state) {
  const Setup& s = setup();
  const Exec exec = state.range(0) ? Exec::parallel : Exec::serial;
  for (auto _ : state) benchmark::DoNotOptimize(decompose_lattice(s.plus, s.minus, s.lattice, 1e-6, exec));
}

void BM_goursat_wavefront(benchmark::State& state) {
  const Setup& s = setup();
  const GoursatBoundary bd = boundary_from_transport(s.plus, s.minus, s.lattice);
  const Exec exec = state.range(0) ? Exec::parallel : Exec::serial;
  for (auto _ : state) {
    benchmark::DoNotOptimize(goursat_solve(as_function(s.rhoPlus), as_function(s.rhoMinus), bd, s.lattice, 1e-6, exec));
  }
}

void BM_goursat_reference(benchmark::State& state) {
  const Setup& s = setup();
  const GoursatBoundary bd = boundary_from_transport(s.plus, s.minus, s.lattice);
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::goursat_solve(as_function(s.rhoPlus), as_function(s.rhoMinus), bd, s.lattice));
  }
}

struct KernelSetup {
  WorldSheetGrid grid;
  std::vector<Vec3> momenta;
  KernelConfig config;

  KernelSetup() {
    const double h = 0.002;
    const LatticeSpec L = LatticeSpec::from_ranges(0.0, 0.0, -3.0, 3.0, h);
    const ChiralProfile p{{{0.5, 1.0, {1.0, 0.5}}}};
    grid = reconstruct(integrate_transport(p, Chirality::plus, -3.0, 3.0, h),
                       integrate_transport(p, Chirality::minus, -3.0, 3.0, h), 1.0, Vec4::Zero(), L);
    for (int k = 0; k < 16; ++k) momenta.emplace_back(0.1 * k, 0.05 * k, -0.1 * k);
    config.cutoffScale = 0.2;
  }
};

void BM_kernel_table(benchmark::State& state) {
  static const KernelSetup k;
  const Exec exec = state.range(0) ? Exec::parallel : Exec::serial;
  for (auto _ : state) benchmark::DoNotOptimize(kernel_table(k.momenta, k.momenta, 0.0, k.grid, k.config, exec));
}

void BM_kernel_reference(benchmark::State& state) {
  static const KernelSetup k;
  for (auto _ : state) benchmark::DoNotOptimize(reference::kernel_table(k.momenta, k.momenta, 0.0, k.grid, k.config));
}

}  // namespace

BENCHMARK(BM_reconstruct_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_reconstruct_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_reconstruct_reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_decompose)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_goursat_wavefront)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_goursat_reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_kernel_table)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_kernel_reference)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
