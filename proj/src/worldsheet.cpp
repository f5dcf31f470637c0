#include "cuspsheet/worldsheet.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cuspsheet/gaussfields.hpp"

namespace cuspsheet {

namespace {

// P(k) = int_0^{k h} n(xi) dxi (spatial part of the frame vector), trapezoid rule.
struct PrefixSums {
  long first = 0;
  std::vector<Vec3> values;
  const Vec3& at(long k) const { return values[static_cast<std::size_t>(k - first)]; }
};

PrefixSums frame_prefix_sums(const TransportSolution& ts) {
  PrefixSums p;
  p.first = ts.first_index();
  const long last = ts.last_index();
  p.values.assign(static_cast<std::size_t>(last - p.first + 1), Vec3::Zero());
  const double half = 0.5 * ts.step();
  const auto n = [&](long k) { return null_vector(ts.at_index(k), ts.chirality()).spatial(); };
  auto slot = [&](long k) -> Vec3& { return p.values[static_cast<std::size_t>(k - p.first)]; };
  Vec3 prev = n(0);
  for (long k = 0; k < last; ++k) {
    const Vec3 next = n(k + 1);
    slot(k + 1) = slot(k) + half * (prev + next);
    prev = next;
  }
  prev = n(0);
  for (long k = 0; k > p.first; --k) {
    const Vec3 next = n(k - 1);
    slot(k - 1) = slot(k) - half * (prev + next);
    prev = next;
  }
  return p;
}

void check_compatible(const TransportSolution& ts, const LatticeSpec& lattice, long lo, long hi) {
  if (std::abs(ts.step() - lattice.step) > 1e-12 * lattice.step) {
    std::ostringstream msg;
    msg << to_string(ts.chirality()) << " transport step " << ts.step() << " differs from lattice step "
        << lattice.step;
    throw std::invalid_argument(msg.str());
  }
  if (!ts.covers_index(lo) || !ts.covers_index(hi)) {
    std::ostringstream msg;
    msg << "insufficient xi coverage for " << to_string(ts.chirality()) << " chirality: need ["
        << static_cast<double>(lo) * lattice.step << ", " << static_cast<double>(hi) * lattice.step << "], have ["
        << ts.grid_start() << ", " << ts.grid_end() << "]";
    throw std::out_of_range(msg.str());
  }
}

}  // namespace

cplx metric_combination(const Matrix2C& tPlus, const Matrix2C& tMinus) {
  return tPlus(0, 0) * tMinus(1, 1) - tPlus(0, 1) * tMinus(1, 0);
}

WorldSheetGrid reconstruct(const TransportSolution& tPlus, const TransportSolution& tMinus, double kappa,
                           const Vec4& basePoint, const LatticeSpec& lattice, Exec exec) {
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  check_compatible(tPlus, lattice, lattice.plus_min(), lattice.plus_max());
  check_compatible(tMinus, lattice, lattice.minus_min(), lattice.minus_max());

  const PrefixSums pPlus = frame_prefix_sums(tPlus);
  const PrefixSums pMinus = frame_prefix_sums(tMinus);

  WorldSheetGrid grid;
  grid.kappa = kappa;
  grid.basePoint = basePoint;
  grid.lattice = lattice;
  const std::size_t nt = lattice.nt();
  const std::size_t ns = lattice.ns();
  grid.X = Field2D<Vec4>(nt, ns, Vec4::Zero());
  grid.metric = Field2D<double>(nt, ns, 0.0);
  const double halfKappa2 = 0.5 * kappa * kappa;

#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::size_t i = 0; i < nt; ++i) {
    const double time = basePoint[0] + kappa * lattice.t(i);
    for (std::size_t j = 0; j < ns; ++j) {
      const long kp = lattice.plus_index(i, j);
      const long km = lattice.minus_index(i, j);
      const Vec3 x = basePoint.tail<3>() + kappa * (pPlus.at(kp) - pMinus.at(km));
      grid.X(i, j) = Vec4(time, x[0], x[1], x[2]);
      grid.metric(i, j) = -halfKappa2 * std::norm(metric_combination(tPlus.at_index(kp), tMinus.at_index(km)));
    }
  }
  return grid;
}

MetricSample metric_coefficient(const TransportSolution& tPlus, const TransportSolution& tMinus, double kappa,
                                double t, double s) {
  const Matrix2C a = tPlus.evaluate(s + t);
  const Matrix2C b = tMinus.evaluate(s - t);
  return {-0.5 * kappa * kappa * std::norm(metric_combination(a, b))};
}

ConstraintReport constraint_residuals(const WorldSheetGrid& grid, std::size_t stride) {
  const std::size_t nt = grid.X.nt();
  const std::size_t ns = grid.X.ns();
  const std::size_t w = stride;
  if (w == 0 || nt < 2 * w + 1 || ns < 2 * w + 1) {
    throw std::invalid_argument("constraint residuals need at least 3 points per axis at the given stride");
  }
  const double h = grid.lattice.step * static_cast<double>(w);
  ConstraintReport r;
  r.step = h;
  for (std::size_t i = w; i + w < nt; i += w) {
    for (std::size_t j = w; j + w < ns; j += w) {
      const Vec4 dp = (grid.X(i + w, j + w) - grid.X(i - w, j - w)) / (4.0 * h);
      const Vec4 dm = (grid.X(i - w, j + w) - grid.X(i + w, j - w)) / (4.0 * h);
      const Vec4 mixed = (grid.X(i, j + w) - grid.X(i + w, j) - grid.X(i - w, j) + grid.X(i, j - w)) / (4.0 * h * h);
      r.nullPlus = std::max(r.nullPlus, std::abs(minkowski_dot(dp, dp)));
      r.nullMinus = std::max(r.nullMinus, std::abs(minkowski_dot(dm, dm)));
      r.wave = std::max(r.wave, mixed.norm());
      ++r.points;
    }
  }
  return r;
}

SecondFormSample second_forms(const TransportSolution& tPlus, const TransportSolution& tMinus,
                              const GaussFields& fields, double kappa, double beta, double t, double s) {
  const LatticeSpec& lat = fields.lattice;
  const double ti = t / lat.step;
  const double sj = s / lat.step;
  if (std::abs(ti - std::round(ti)) > 1e-6 || std::abs(sj - std::round(sj)) > 1e-6) {
    throw std::invalid_argument("second_forms expects a lattice point");
  }
  const long il = std::lround(ti) - lat.tFirst;
  const long jl = std::lround(sj) - lat.sFirst;
  if (il < 0 || jl < 0 || il >= static_cast<long>(lat.nt()) || jl >= static_cast<long>(lat.ns())) {
    throw std::out_of_range("second_forms: (t, s) outside the field lattice");
  }
  const auto i = static_cast<std::size_t>(il);
  const auto j = static_cast<std::size_t>(jl);
  std::ostringstream where;
  where << "(t, s) = (" << t << ", " << s << ")";
  if (fields.singular(i, j)) throw PhaseUndefined("Gauss decomposition singular at " + where.str());
  const cplx rp = tPlus.profile()(s + t);
  const cplx rm = tMinus.profile()(s - t);
  if (rp == cplx{}) throw PhaseUndefined("rho+ vanishes at " + where.str());
  if (rm == cplx{}) throw PhaseUndefined("rho- vanishes at " + where.str());

  SecondFormSample out;
  out.beta = beta;
  out.chi = 0.5 * (fields.phi(i, j).imag() + std::arg(rp) + std::arg(rm));
  out.modulusPlus = kappa * std::abs(rp);
  out.modulusMinus = kappa * std::abs(rm);
  out.phasePlus = beta + out.chi;
  out.phaseMinus = beta - out.chi;
  return out;
}

}  // namespace cuspsheet
