#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cuspsheet/gaussfields.hpp"

namespace cuspsheet {

namespace {

constexpr double kFourPi = 4.0 * pi;

cplx unwrap_to(cplx phi, cplx anchor) {
  const double n = std::round((anchor.imag() - phi.imag()) / kFourPi);
  return {phi.real(), phi.imag() + n * kFourPi};
}

struct Extent {
  long plusFirst, plusLast, minusFirst, minusLast;
};

Extent characteristic_extent(const LatticeSpec& lattice) {
  return {std::min(0L, lattice.plus_min()), std::max(0L, lattice.plus_max()), std::min(0L, lattice.minus_min()),
          std::max(0L, lattice.minus_max())};
}

// Full (xi+, xi-) lattice with spacing h; the (t, s) lattice is its even sub-lattice.
class CharacteristicGrid {
 public:
  explicit CharacteristicGrid(const Extent& e)
      : e_(e),
        cols_(static_cast<std::size_t>(e.minusLast - e.minusFirst + 1)),
        data_(static_cast<std::size_t>(e.plusLast - e.plusFirst + 1) * cols_) {}

  cplx& operator()(long a, long b) {
    return data_[static_cast<std::size_t>(a - e_.plusFirst) * cols_ + static_cast<std::size_t>(b - e_.minusFirst)];
  }
  cplx operator()(long a, long b) const {
    return data_[static_cast<std::size_t>(a - e_.plusFirst) * cols_ + static_cast<std::size_t>(b - e_.minusFirst)];
  }

 private:
  Extent e_;
  std::size_t cols_;
  std::vector<cplx> data_;
};

void check_boundary(const GoursatBoundary& bd, const Extent& e, const LatticeSpec& lattice) {
  if (std::abs(bd.step - lattice.step) > 1e-12 * lattice.step) {
    throw std::invalid_argument("Goursat boundary step differs from lattice step");
  }
  const auto covers = [](long first, std::size_t n, long lo, long hi) {
    return first <= lo && first + static_cast<long>(n) - 1 >= hi;
  };
  if (!covers(bd.plusFirst, bd.phiAlongPlus.size(), e.plusFirst, e.plusLast) ||
      bd.alphaPlusAlongPlus.size() != bd.phiAlongPlus.size() ||
      !covers(bd.minusFirst, bd.phiAlongMinus.size(), e.minusFirst, e.minusLast) ||
      bd.alphaMinusAlongMinus.size() != bd.phiAlongMinus.size()) {
    throw std::invalid_argument("Goursat boundary data does not cover the characteristic lattice");
  }
  const cplx cornerPlus = bd.phiAlongPlus[static_cast<std::size_t>(-bd.plusFirst)];
  const cplx cornerMinus = bd.phiAlongMinus[static_cast<std::size_t>(-bd.minusFirst)];
  if (std::abs(cornerPlus - cornerMinus) > 1e-10 * (1.0 + std::abs(cornerPlus))) {
    throw std::invalid_argument("Goursat boundary data inconsistent at the corner");
  }
}

struct Workspace {
  Extent e;
  double h;
  std::vector<cplx> rhoPlusHalf;   // rho+((a + 1/2) h), a in [plusFirst, plusLast)
  std::vector<cplx> rhoMinusHalf;  // rho-((b + 1/2) h)
  std::vector<cplx> rhoPlusNode;
  std::vector<cplx> rhoMinusNode;
};

Workspace make_workspace(const ProfileFunction& rp, const ProfileFunction& rm, const Extent& e, double h) {
  Workspace w{e, h, {}, {}, {}, {}};
  for (long a = e.plusFirst; a <= e.plusLast; ++a) {
    w.rhoPlusNode.push_back(rp(static_cast<double>(a) * h));
    if (a < e.plusLast) w.rhoPlusHalf.push_back(rp((static_cast<double>(a) + 0.5) * h));
  }
  for (long b = e.minusFirst; b <= e.minusLast; ++b) {
    w.rhoMinusNode.push_back(rm(static_cast<double>(b) * h));
    if (b < e.minusLast) w.rhoMinusHalf.push_back(rm((static_cast<double>(b) + 0.5) * h));
  }
  return w;
}

// Closes the cell with far corner (a, b), stepping (sa, sb) away from the axes.
// Returns false on overflow.
bool close_cell(CharacteristicGrid& phi, const Workspace& w, long a, long b, long sa, long sb) {
  const long a0 = a - sa;
  const long b0 = b - sb;
  const cplx p00 = phi(a0, b0);
  const cplx p10 = phi(a, b0);
  const cplx p01 = phi(a0, b);
  const cplx rp = w.rhoPlusHalf[static_cast<std::size_t>(std::min(a, a0) - w.e.plusFirst)];
  const cplx rm = w.rhoMinusHalf[static_cast<std::size_t>(std::min(b, b0) - w.e.minusFirst)];
  const cplx source = 2.0 * rp * rm * (static_cast<double>(sa * sb) * w.h * w.h);
  const cplx linear = p10 + p01 - p00;
  cplx p11 = linear + source * std::exp(0.5 * (p10 + p01));
  p11 = linear + source * std::exp(0.25 * (p00 + p10 + p01 + p11));
  phi(a, b) = p11;
  return std::isfinite(p11.real()) && std::abs(p11.real()) <= kOverflowGuard;
}

void integrate_alphas(const CharacteristicGrid& phi, CharacteristicGrid& alphaPlus, CharacteristicGrid& alphaMinus,
                      const GoursatBoundary& bd, const Workspace& w, Exec exec) {
  const Extent& e = w.e;
  const double half = 0.5 * w.h;
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (long b = e.minusFirst; b <= e.minusLast; ++b) {
    // d+ alpha- = rho+ e^phi along xi+, from the axis xi+ = 0.
    const auto integrand = [&](long a) {
      return w.rhoPlusNode[static_cast<std::size_t>(a - e.plusFirst)] * std::exp(phi(a, b));
    };
    alphaMinus(0, b) = bd.alphaMinusAlongMinus[static_cast<std::size_t>(b - bd.minusFirst)];
    for (long a = 0; a < e.plusLast; ++a) alphaMinus(a + 1, b) = alphaMinus(a, b) + half * (integrand(a) + integrand(a + 1));
    for (long a = 0; a > e.plusFirst; --a) alphaMinus(a - 1, b) = alphaMinus(a, b) - half * (integrand(a) + integrand(a - 1));
  }
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (long a = e.plusFirst; a <= e.plusLast; ++a) {
    const auto integrand = [&](long b) {
      return w.rhoMinusNode[static_cast<std::size_t>(b - e.minusFirst)] * std::exp(phi(a, b));
    };
    alphaPlus(a, 0) = bd.alphaPlusAlongPlus[static_cast<std::size_t>(a - bd.plusFirst)];
    for (long b = 0; b < e.minusLast; ++b) alphaPlus(a, b + 1) = alphaPlus(a, b) + half * (integrand(b) + integrand(b + 1));
    for (long b = 0; b > e.minusFirst; --b) alphaPlus(a, b - 1) = alphaPlus(a, b) - half * (integrand(b) + integrand(b - 1));
  }
}

GaussFields restrict_to_lattice(const CharacteristicGrid& phi, const CharacteristicGrid& alphaPlus,
                                const CharacteristicGrid& alphaMinus, const LatticeSpec& lattice, double threshold) {
  GaussFields f;
  f.lattice = lattice;
  f.threshold = threshold;
  const std::size_t nt = lattice.nt();
  const std::size_t ns = lattice.ns();
  f.phi = Field2D<cplx>(nt, ns);
  f.alphaPlus = Field2D<cplx>(nt, ns);
  f.alphaMinus = Field2D<cplx>(nt, ns);
  f.singular = Mask2D(nt, ns, 0);
  f.branchJump = Mask2D(nt, ns, 0);
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < ns; ++j) {
      const long a = lattice.plus_index(i, j);
      const long b = lattice.minus_index(i, j);
      f.phi(i, j) = phi(a, b);
      f.alphaPlus(i, j) = alphaPlus(a, b);
      f.alphaMinus(i, j) = alphaMinus(a, b);
      f.singular(i, j) = std::abs(std::exp(-0.5 * phi(a, b))) <= threshold ? 1 : 0;
    }
  }
  return f;
}

CharacteristicGrid seed_axes(const GoursatBoundary& bd, const Extent& e) {
  CharacteristicGrid phi(e);
  for (long a = e.plusFirst; a <= e.plusLast; ++a) phi(a, 0) = bd.phiAlongPlus[static_cast<std::size_t>(a - bd.plusFirst)];
  for (long b = e.minusFirst; b <= e.minusLast; ++b) phi(0, b) = bd.phiAlongMinus[static_cast<std::size_t>(b - bd.minusFirst)];
  return phi;
}

enum class Sweep { antiDiagonal, rows };

GaussFields solve(const ProfileFunction& rp, const ProfileFunction& rm, const GoursatBoundary& bd,
                  const LatticeSpec& lattice, double threshold, Exec exec, Sweep sweep) {
  const Extent e = characteristic_extent(lattice);
  check_boundary(bd, e, lattice);
  const Workspace w = make_workspace(rp, rm, e, lattice.step);
  CharacteristicGrid phi = seed_axes(bd, e);

  for (long sa : {1L, -1L}) {
    for (long sb : {1L, -1L}) {
      const long aMax = sa > 0 ? e.plusLast : -e.plusFirst;
      const long bMax = sb > 0 ? e.minusLast : -e.minusFirst;
      if (aMax < 1 || bMax < 1) continue;
      std::atomic<bool> overflow{false};
      std::atomic<long> badA{0};
      std::atomic<long> badB{0};
      const auto cell = [&](long u, long v) {
        if (!close_cell(phi, w, sa * u, sb * v, sa, sb) && !overflow.exchange(true)) {
          badA = sa * u;
          badB = sb * v;
        }
      };
      if (sweep == Sweep::rows) {
        for (long u = 1; u <= aMax && !overflow; ++u)
          for (long v = 1; v <= bMax; ++v) cell(u, v);
      } else {
        for (long d = 2; d <= aMax + bMax && !overflow; ++d) {
          const long uLo = std::max(1L, d - bMax);
          const long uHi = std::min(aMax, d - 1);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel && uHi - uLo > 64)
          for (long u = uLo; u <= uHi; ++u) cell(u, d - u);
        }
      }
      if (overflow) {
        throw GoursatBlowUp(static_cast<double>(badA.load()) * w.h, static_cast<double>(badB.load()) * w.h,
                            phi(badA.load(), badB.load()).real());
      }
    }
  }
  CharacteristicGrid alphaPlus(e);
  CharacteristicGrid alphaMinus(e);
  integrate_alphas(phi, alphaPlus, alphaMinus, bd, w, exec);
  return restrict_to_lattice(phi, alphaPlus, alphaMinus, lattice, threshold);
}

}  // namespace

GoursatBlowUp::GoursatBlowUp(double xp, double xm, double rePhi)
    : std::runtime_error([&] {
        std::ostringstream msg;
        msg << "Goursat solution blew up (Re phi = " << rePhi << ") at xi+ = " << xp << ", xi- = " << xm;
        return msg.str();
      }()),
      xiPlus(xp),
      xiMinus(xm) {}

GoursatBoundary boundary_from_transport(const TransportSolution& tPlus, const TransportSolution& tMinus,
                                        const LatticeSpec& lattice) {
  const Extent e = characteristic_extent(lattice);
  if (!tPlus.covers_index(e.plusFirst) || !tPlus.covers_index(e.plusLast) || !tMinus.covers_index(e.minusFirst) ||
      !tMinus.covers_index(e.minusLast)) {
    throw std::out_of_range("boundary_from_transport: transport grids do not cover the characteristic lattice");
  }
  GoursatBoundary bd;
  bd.step = lattice.step;
  bd.plusFirst = e.plusFirst;
  bd.minusFirst = e.minusFirst;
  const std::size_t np = static_cast<std::size_t>(e.plusLast - e.plusFirst + 1);
  const std::size_t nm = static_cast<std::size_t>(e.minusLast - e.minusFirst + 1);
  bd.phiAlongPlus.resize(np);
  bd.alphaPlusAlongPlus.resize(np);
  bd.phiAlongMinus.resize(nm);
  bd.alphaMinusAlongMinus.resize(nm);

  const auto decompose = [&](long a, long b, cplx anchor) {
    const Matrix2C k = tPlus.at_index(a) * sl2_inverse(tMinus.at_index(b));
    const auto g = gauss_decompose(k, anchor);
    if (!g) {
      std::ostringstream msg;
      msg << "Goursat axis crosses a singular point at xi+ = " << static_cast<double>(a) * lattice.step
          << ", xi- = " << static_cast<double>(b) * lattice.step;
      throw std::invalid_argument(msg.str());
    }
    return *g;
  };
  const auto fill_plus = [&](long a, cplx anchor) {
    const GaussFactors g = decompose(a, 0, anchor);
    bd.phiAlongPlus[static_cast<std::size_t>(a - e.plusFirst)] = g.phi;
    bd.alphaPlusAlongPlus[static_cast<std::size_t>(a - e.plusFirst)] = g.alphaPlus;
    return g.phi;
  };
  const auto fill_minus = [&](long b, cplx anchor) {
    const GaussFactors g = decompose(0, b, anchor);
    bd.phiAlongMinus[static_cast<std::size_t>(b - e.minusFirst)] = g.phi;
    bd.alphaMinusAlongMinus[static_cast<std::size_t>(b - e.minusFirst)] = g.alphaMinus;
    return g.phi;
  };
  const cplx origin = fill_plus(0, {});
  fill_minus(0, origin);
  cplx anchor = origin;
  for (long a = 1; a <= e.plusLast; ++a) anchor = fill_plus(a, anchor);
  anchor = origin;
  for (long a = -1; a >= e.plusFirst; --a) anchor = fill_plus(a, anchor);
  anchor = origin;
  for (long b = 1; b <= e.minusLast; ++b) anchor = fill_minus(b, anchor);
  anchor = origin;
  for (long b = -1; b >= e.minusFirst; --b) anchor = fill_minus(b, anchor);
  return bd;
}

GoursatBoundary boundary_from_functions(const std::function<cplx(double, double)>& phi,
                                        const std::function<cplx(double, double)>& alphaPlus,
                                        const std::function<cplx(double, double)>& alphaMinus,
                                        const LatticeSpec& lattice) {
  const Extent e = characteristic_extent(lattice);
  const double h = lattice.step;
  GoursatBoundary bd;
  bd.step = h;
  bd.plusFirst = e.plusFirst;
  bd.minusFirst = e.minusFirst;
  for (long a = e.plusFirst; a <= e.plusLast; ++a) {
    bd.phiAlongPlus.push_back(phi(static_cast<double>(a) * h, 0.0));
    bd.alphaPlusAlongPlus.push_back(alphaPlus(static_cast<double>(a) * h, 0.0));
  }
  for (long b = e.minusFirst; b <= e.minusLast; ++b) {
    bd.phiAlongMinus.push_back(phi(0.0, static_cast<double>(b) * h));
    bd.alphaMinusAlongMinus.push_back(alphaMinus(0.0, static_cast<double>(b) * h));
  }
  // Keep Im phi continuous along each axis.
  const auto unwrap_axis = [](std::vector<cplx>& v, std::size_t origin) {
    for (std::size_t k = origin + 1; k < v.size(); ++k) v[k] = unwrap_to(v[k], v[k - 1]);
    for (std::size_t k = origin; k-- > 0;) v[k] = unwrap_to(v[k], v[k + 1]);
  };
  unwrap_axis(bd.phiAlongPlus, static_cast<std::size_t>(-e.plusFirst));
  unwrap_axis(bd.phiAlongMinus, static_cast<std::size_t>(-e.minusFirst));
  return bd;
}

GaussFields goursat_solve(const ProfileFunction& rhoPlus, const ProfileFunction& rhoMinus,
                          const GoursatBoundary& boundary, const LatticeSpec& lattice, double threshold, Exec exec) {
  return solve(rhoPlus, rhoMinus, boundary, lattice, threshold, exec, Sweep::antiDiagonal);
}

namespace detail {
GaussFields goursat_solve_rows(const ProfileFunction& rhoPlus, const ProfileFunction& rhoMinus,
                               const GoursatBoundary& boundary, const LatticeSpec& lattice, double threshold) {
  return solve(rhoPlus, rhoMinus, boundary, lattice, threshold, Exec::serial, Sweep::rows);
}
}  // namespace detail

}  // namespace cuspsheet
