#include "cuspsheet/gaussfields.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "cuspsheet/worldsheet.hpp"

namespace cuspsheet {

namespace {

constexpr double kFourPi = 4.0 * pi;

// Shift phi by a multiple of 4 pi i towards anchor.
cplx nearest_branch(cplx phi, cplx anchor) {
  const double n = std::round((anchor.imag() - phi.imag()) / kFourPi);
  return {phi.real(), phi.imag() + n * kFourPi};
}

Mask2D dilate(const Mask2D& mask, std::size_t radius) {
  if (radius == 0) return mask;
  const std::size_t nt = mask.nt();
  const std::size_t ns = mask.ns();
  Mask2D out(nt, ns, 0);
  const long r = static_cast<long>(radius);
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < ns; ++j) {
      if (!mask(i, j)) continue;
      for (long di = -r; di <= r; ++di) {
        for (long dj = -r; dj <= r; ++dj) {
          const long a = static_cast<long>(i) + di;
          const long b = static_cast<long>(j) + dj;
          if (a >= 0 && b >= 0 && a < static_cast<long>(nt) && b < static_cast<long>(ns)) {
            out(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) = 1;
          }
        }
      }
    }
  }
  return out;
}

std::size_t nearest_index(long first, std::size_t n) {
  const long idx = std::clamp(-first, 0L, static_cast<long>(n) - 1);
  return static_cast<std::size_t>(idx);
}

// Continue Im phi along rows starting from the lattice point nearest the origin.
void continue_branch(GaussFields& f, cplx anchor) {
  const std::size_t nt = f.lattice.nt();
  const std::size_t ns = f.lattice.ns();
  const std::size_t i0 = nearest_index(f.lattice.tFirst, nt);
  const std::size_t j0 = nearest_index(f.lattice.sFirst, ns);

  auto continue_row = [&](std::size_t i, cplx rowAnchor) {
    cplx last = rowAnchor;
    for (std::size_t j = j0; j < ns; ++j) {
      if (f.singular(i, j)) continue;
      f.phi(i, j) = nearest_branch(f.phi(i, j), last);
      last = f.phi(i, j);
    }
    last = f.singular(i, j0) ? rowAnchor : f.phi(i, j0);
    for (std::size_t j = j0; j-- > 0;) {
      if (f.singular(i, j)) continue;
      f.phi(i, j) = nearest_branch(f.phi(i, j), last);
      last = f.phi(i, j);
    }
  };

  cplx columnAnchor = anchor;
  for (std::size_t i = i0; i < nt; ++i) {
    continue_row(i, columnAnchor);
    if (!f.singular(i, j0)) columnAnchor = f.phi(i, j0);
  }
  columnAnchor = f.singular(i0, j0) ? anchor : f.phi(i0, j0);
  for (std::size_t i = i0; i-- > 0;) {
    continue_row(i, columnAnchor);
    if (!f.singular(i, j0)) columnAnchor = f.phi(i, j0);
  }
}

void flag_branch_jumps(GaussFields& f) {
  const std::size_t nt = f.lattice.nt();
  const std::size_t ns = f.lattice.ns();
  f.branchJump = Mask2D(nt, ns, 0);
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < ns; ++j) {
      if (f.singular(i, j)) continue;
      const auto jump = [&](std::size_t a, std::size_t b) {
        return !f.singular(a, b) && std::abs(f.phi(a, b).imag() - f.phi(i, j).imag()) > pi;
      };
      if ((i + 1 < nt && jump(i + 1, j)) || (j + 1 < ns && jump(i, j + 1))) {
        f.branchJump(i, j) = 1;
        if (i + 1 < nt && jump(i + 1, j)) f.branchJump(i + 1, j) = 1;
        if (j + 1 < ns && jump(i, j + 1)) f.branchJump(i, j + 1) = 1;
      }
    }
  }
}

GaussFields empty_fields(const LatticeSpec& lattice, double threshold) {
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
  return f;
}

}  // namespace

double PdeResiduals::max_residual() const {
  return std::max({liouville, chiralPlus, chiralMinus, alphaMinus, alphaPlus});
}

Matrix2C k_field(const TransportSolution& tPlus, const TransportSolution& tMinus, double t, double s) {
  return tPlus.evaluate(s + t) * sl2_inverse(tMinus.evaluate(s - t));
}

std::optional<GaussFactors> gauss_decompose(const Matrix2C& k, cplx branchAnchor, double threshold) {
  const cplx k11 = k(0, 0);
  if (!(std::abs(k11) > threshold)) return std::nullopt;
  GaussFactors g;
  g.phi = nearest_branch(-2.0 * std::log(k11), branchAnchor);
  g.alphaMinus = k(0, 1) / k11;
  g.alphaPlus = -k(1, 0) / k11;
  return g;
}

Matrix2C gauss_compose(const GaussFactors& g) {
  Matrix2C lower;
  lower << 1.0, 0.0, -g.alphaPlus, 1.0;
  Matrix2C diag = Matrix2C::Zero();
  diag(0, 0) = std::exp(-0.5 * g.phi);
  diag(1, 1) = std::exp(0.5 * g.phi);
  Matrix2C upper;
  upper << 1.0, g.alphaMinus, 0.0, 1.0;
  return lower * diag * upper;
}

GaussFields decompose_lattice(const TransportSolution& tPlus, const TransportSolution& tMinus,
                              const LatticeSpec& lattice, double threshold, Exec exec) {
  if (!tPlus.covers_index(lattice.plus_min()) || !tPlus.covers_index(lattice.plus_max()) ||
      !tMinus.covers_index(lattice.minus_min()) || !tMinus.covers_index(lattice.minus_max())) {
    throw std::out_of_range("decompose_lattice: transport grids do not cover the lattice");
  }
  GaussFields f = empty_fields(lattice, threshold);
  const std::size_t nt = lattice.nt();
  const std::size_t ns = lattice.ns();

#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < ns; ++j) {
      const Matrix2C k =
          tPlus.at_index(lattice.plus_index(i, j)) * sl2_inverse(tMinus.at_index(lattice.minus_index(i, j)));
      const auto g = gauss_decompose(k, {}, threshold);
      if (!g) {
        f.singular(i, j) = 1;
        continue;
      }
      f.phi(i, j) = g->phi;
      f.alphaPlus(i, j) = g->alphaPlus;
      f.alphaMinus(i, j) = g->alphaMinus;
    }
  }
  continue_branch(f, {});
  flag_branch_jumps(f);
  return f;
}

PdeResiduals pde_residuals(const GaussFields& f, const ProfileFunction& rhoPlus, const ProfileFunction& rhoMinus,
                           const ResidualOptions& options) {
  const std::size_t nt = f.lattice.nt();
  const std::size_t ns = f.lattice.ns();
  const std::size_t w = options.stride;
  if (w == 0 || nt < 4 * w + 1 || ns < 4 * w + 1) {
    throw std::invalid_argument("pde_residuals needs at least 4 * stride + 1 points per axis");
  }
  const double h = f.lattice.step * static_cast<double>(w);
  const Mask2D blocked = [&] {
    Mask2D b = dilate(f.singular, options.maskDilation);
    for (std::size_t i = 0; i < nt; ++i)
      for (std::size_t j = 0; j < ns; ++j)
        if (f.branchJump(i, j) || std::abs(std::exp(-0.5 * f.phi(i, j))) < options.minModulus) b(i, j) = 1;
    if (options.exclude.nt() == nt && options.exclude.ns() == ns) {
      for (std::size_t i = 0; i < nt; ++i)
        for (std::size_t j = 0; j < ns; ++j)
          if (options.exclude(i, j)) b(i, j) = 1;
    } else if (options.exclude.nt() != 0) {
      throw std::invalid_argument("pde_residuals: exclude mask does not match the field lattice");
    }
    return b;
  }();

  const auto xiPlus = [&](std::size_t i, std::size_t j) {
    return static_cast<double>(f.lattice.plus_index(i, j)) * f.lattice.step;
  };
  const auto xiMinus = [&](std::size_t i, std::size_t j) {
    return static_cast<double>(f.lattice.minus_index(i, j)) * f.lattice.step;
  };
  // Stencil values of phi unwrapped onto the branch of the centre.
  const auto phi_at = [&](std::size_t a, std::size_t b, cplx centre) { return nearest_branch(f.phi(a, b), centre); };
  const auto stencil_ok = [&](std::size_t i, std::size_t j) {
    return !blocked(i, j) && !blocked(i + w, j + w) && !blocked(i - w, j - w) && !blocked(i - w, j + w) &&
           !blocked(i + w, j - w) && !blocked(i + w, j) && !blocked(i - w, j) && !blocked(i, j + w) &&
           !blocked(i, j - w);
  };

  // Recovered rho on the sub-lattice of centres (every w-th point).
  Field2D<cplx> recPlus(nt, ns);
  Field2D<cplx> recMinus(nt, ns);
  Mask2D recOk(nt, ns, 0);

  PdeResiduals r;
  r.step = h;
  for (std::size_t i = w; i + w < nt; i += w) {
    for (std::size_t j = w; j + w < ns; j += w) {
      if (!stencil_ok(i, j)) {
        ++r.skipped;
        continue;
      }
      const cplx c = f.phi(i, j);
      const cplx ePhi = std::exp(c);
      const cplx rp = rhoPlus(xiPlus(i, j));
      const cplx rm = rhoMinus(xiMinus(i, j));
      const cplx mixed = (phi_at(i, j + w, c) - phi_at(i + w, j, c) - phi_at(i - w, j, c) + phi_at(i, j - w, c)) /
                         (4.0 * h * h);
      const cplx dpAlphaMinus = (f.alphaMinus(i + w, j + w) - f.alphaMinus(i - w, j - w)) / (4.0 * h);
      const cplx dmAlphaPlus = (f.alphaPlus(i - w, j + w) - f.alphaPlus(i + w, j - w)) / (4.0 * h);
      r.liouville = std::max(r.liouville, std::abs(mixed - 2.0 * rp * rm * ePhi));
      r.alphaMinus = std::max(r.alphaMinus, std::abs(dpAlphaMinus - rp * ePhi));
      r.alphaPlus = std::max(r.alphaPlus, std::abs(dmAlphaPlus - rm * ePhi));
      recPlus(i, j) = dpAlphaMinus / ePhi;
      recMinus(i, j) = dmAlphaPlus / ePhi;
      recOk(i, j) = 1;
      r.rhoRecovery = std::max({r.rhoRecovery, std::abs(recPlus(i, j) - rp), std::abs(recMinus(i, j) - rm)});
      ++r.points;
    }
  }
  for (std::size_t i = 2 * w; i + 2 * w < nt; i += w) {
    for (std::size_t j = 2 * w; j + 2 * w < ns; j += w) {
      if (recOk(i - w, j + w) && recOk(i + w, j - w)) {
        r.chiralPlus = std::max(r.chiralPlus, std::abs((recPlus(i - w, j + w) - recPlus(i + w, j - w)) / (4.0 * h)));
      }
      if (recOk(i + w, j + w) && recOk(i - w, j - w)) {
        r.chiralMinus =
            std::max(r.chiralMinus, std::abs((recMinus(i + w, j + w) - recMinus(i - w, j - w)) / (4.0 * h)));
      }
    }
  }
  return r;
}

CrossValidation cross_validate(const TransportSolution& tPlus, const TransportSolution& tMinus,
                               const GaussFields& fields, std::size_t maskDilation) {
  const LatticeSpec& lat = fields.lattice;
  const Mask2D blocked = dilate(fields.singular, maskDilation);
  CrossValidation cv;
  for (std::size_t i = 0; i < lat.nt(); ++i) {
    for (std::size_t j = 0; j < lat.ns(); ++j) {
      if (blocked(i, j)) {
        ++cv.excluded;
        continue;
      }
      const double viaTransport =
          std::norm(metric_combination(tPlus.at_index(lat.plus_index(i, j)), tMinus.at_index(lat.minus_index(i, j))));
      const double viaFields = std::exp(-fields.phi(i, j).real());
      cv.maxRelativeDeviation = std::max(cv.maxRelativeDeviation, std::abs(viaFields - viaTransport) / viaTransport);
      ++cv.compared;
    }
  }
  return cv;
}

FieldFunctions apply_gauge(const FieldFunctions& in, const GaugeElement& g, double xiMin, double xiMax) {
  if (!g.identityReparametrization) {
    constexpr int kSamples = 2001;
    for (const auto* da : {&g.daPlus, &g.daMinus}) {
      int sign = 0;
      for (int n = 0; n < kSamples; ++n) {
        const double x = xiMin + (xiMax - xiMin) * n / (kSamples - 1);
        const double d = (*da)(x);
        const int sg = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
        if (sg == 0 || (sign != 0 && sg != sign)) {
          std::ostringstream msg;
          msg << "reparametrization is not strictly monotone near xi = " << x;
          throw std::invalid_argument(msg.str());
        }
        sign = sg;
      }
    }
  }
  FieldFunctions out;
  out.phi = [in, g](double xp, double xm) { return in.phi(g.aPlus(xp), g.aMinus(xm)) + g.fPlus(xp) + g.fMinus(xm); };
  out.rhoPlus = [in, g](double x) { return in.rhoPlus(g.aPlus(x)) * g.daPlus(x) * std::exp(-g.fPlus(x)); };
  out.rhoMinus = [in, g](double x) { return in.rhoMinus(g.aMinus(x)) * g.daMinus(x) * std::exp(-g.fMinus(x)); };
  out.alphaPlus = [in, g](double xp, double xm) {
    return in.alphaPlus(g.aPlus(xp), g.aMinus(xm)) * std::exp(g.fPlus(xp)) + g.gPlus(xp);
  };
  out.alphaMinus = [in, g](double xp, double xm) {
    return in.alphaMinus(g.aPlus(xp), g.aMinus(xm)) * std::exp(g.fMinus(xm)) + g.gMinus(xm);
  };
  return out;
}

GaugedLatticeFields apply_gauge(const GaussFields& fields, const ProfileFunction& rhoPlus,
                                const ProfileFunction& rhoMinus, const GaugeElement& g) {
  if (!g.identityReparametrization) {
    throw std::invalid_argument("lattice gauge needs A+- = identity; use the functional form to reparametrize");
  }
  GaugedLatticeFields out;
  out.fields = fields;
  const LatticeSpec& lat = fields.lattice;
  for (std::size_t i = 0; i < lat.nt(); ++i) {
    for (std::size_t j = 0; j < lat.ns(); ++j) {
      if (fields.singular(i, j)) continue;
      const double xp = static_cast<double>(lat.plus_index(i, j)) * lat.step;
      const double xm = static_cast<double>(lat.minus_index(i, j)) * lat.step;
      const cplx fp = g.fPlus(xp);
      const cplx fm = g.fMinus(xm);
      out.fields.phi(i, j) = fields.phi(i, j) + fp + fm;
      out.fields.alphaPlus(i, j) = fields.alphaPlus(i, j) * std::exp(fp) + g.gPlus(xp);
      out.fields.alphaMinus(i, j) = fields.alphaMinus(i, j) * std::exp(fm) + g.gMinus(xm);
    }
  }
  out.rhoPlus = [rhoPlus, g](double x) { return rhoPlus(x) * std::exp(-g.fPlus(x)); };
  out.rhoMinus = [rhoMinus, g](double x) { return rhoMinus(x) * std::exp(-g.fMinus(x)); };
  return out;
}

FieldFunctions transport_field_functions(const TransportSolution& tPlus, const TransportSolution& tMinus) {
  auto plus = std::make_shared<const TransportSolution>(tPlus);
  auto minus = std::make_shared<const TransportSolution>(tMinus);
  const auto k = [plus, minus](double xp, double xm) {
    return Matrix2C(plus->evaluate(xp) * sl2_inverse(minus->evaluate(xm)));
  };
  FieldFunctions f;
  f.phi = [k](double xp, double xm) { return -2.0 * std::log(k(xp, xm)(0, 0)); };
  f.alphaMinus = [k](double xp, double xm) {
    const Matrix2C m = k(xp, xm);
    return m(0, 1) / m(0, 0);
  };
  f.alphaPlus = [k](double xp, double xm) {
    const Matrix2C m = k(xp, xm);
    return -m(1, 0) / m(0, 0);
  };
  f.rhoPlus = as_function(tPlus.profile());
  f.rhoMinus = as_function(tMinus.profile());
  return f;
}

GaussFields sample_fields(const FieldFunctions& fields, const LatticeSpec& lattice, double threshold) {
  GaussFields f = empty_fields(lattice, threshold);
  for (std::size_t i = 0; i < lattice.nt(); ++i) {
    for (std::size_t j = 0; j < lattice.ns(); ++j) {
      const double xp = static_cast<double>(lattice.plus_index(i, j)) * lattice.step;
      const double xm = static_cast<double>(lattice.minus_index(i, j)) * lattice.step;
      f.phi(i, j) = fields.phi(xp, xm);
      if (!(std::abs(std::exp(-0.5 * f.phi(i, j))) > threshold)) {
        f.singular(i, j) = 1;
        continue;
      }
      f.alphaPlus(i, j) = fields.alphaPlus(xp, xm);
      f.alphaMinus(i, j) = fields.alphaMinus(xp, xm);
    }
  }
  flag_branch_jumps(f);
  return f;
}

}  // namespace cuspsheet
