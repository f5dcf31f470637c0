#include "cuspsheet/capture_kernel.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cuspsheet {

namespace {

double psi(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

// C-infinity step: 0 at x <= 0, 1 at x >= 1.
double smooth_step(double x) {
  const double a = psi(x);
  const double b = psi(1.0 - x);
  return a / (a + b);
}

// Columns and composite weights (without the factor h) for the s-integral.
struct Quadrature {
  std::size_t row = 0;
  std::vector<std::size_t> cols;
  std::vector<double> weights;  // already multiplied by g(s) and h
};

std::vector<double> simpson_weights(std::size_t intervals) {
  std::vector<double> w(intervals + 1, 0.0);
  if (intervals == 1) {
    w[0] = w[1] = 0.5;
    return w;
  }
  const auto simpson = [&](std::size_t first, std::size_t n) {
    for (std::size_t k = 0; k < n; k += 2) {
      w[first + k] += 1.0 / 3.0;
      w[first + k + 1] += 4.0 / 3.0;
      w[first + k + 2] += 1.0 / 3.0;
    }
  };
  if (intervals % 2 == 0) {
    simpson(0, intervals);
  } else {
    const std::size_t n = intervals - 3;
    if (n > 0) simpson(0, n);
    w[n] += 3.0 / 8.0;
    w[n + 1] += 9.0 / 8.0;
    w[n + 2] += 9.0 / 8.0;
    w[n + 3] += 3.0 / 8.0;
  }
  return w;
}

Quadrature build_quadrature(double t, const WorldSheetGrid& grid, const KernelConfig& config) {
  const LatticeSpec& L = grid.lattice;
  const double h = L.step;
  const long ti = std::lround(t / h);
  if (std::abs(static_cast<double>(ti) * h - t) > 1e-9 * h || ti < L.tFirst || ti > L.tLast) {
    std::ostringstream msg;
    msg << "kernel time t = " << t << " is not a lattice time in [" << L.t(0) << ", " << L.t(L.nt() - 1) << "]";
    throw std::out_of_range(msg.str());
  }
  const double reach = config.plateauHalfWidth + config.tailWidth;
  const long j0 = static_cast<long>(std::ceil(-reach / h - 1e-9));
  const long j1 = static_cast<long>(std::floor(reach / h + 1e-9));
  if (j0 < L.sFirst || j1 > L.sLast) {
    std::ostringstream msg;
    msg << "form factor support [" << -reach << ", " << reach << "] exceeds lattice s range [" << L.s(0) << ", "
        << L.s(L.ns() - 1) << "]";
    throw std::out_of_range(msg.str());
  }
  // Trim nodes where g already vanishes so the rule ends on the support.
  long lo = j0;
  long hi = j1;
  while (lo < hi && config.form_factor(static_cast<double>(lo) * h) == 0.0) ++lo;
  while (hi > lo && config.form_factor(static_cast<double>(hi) * h) == 0.0) --hi;
  if (hi <= lo) throw std::invalid_argument("form factor support narrower than one lattice step");
  Quadrature q;
  q.row = static_cast<std::size_t>(ti - L.tFirst);
  const std::vector<double> w = simpson_weights(static_cast<std::size_t>(hi - lo));
  for (long j = lo; j <= hi; ++j) {
    q.cols.push_back(static_cast<std::size_t>(j - L.sFirst));
    q.weights.push_back(h * config.form_factor(static_cast<double>(j) * h) * w[static_cast<std::size_t>(j - lo)]);
  }
  return q;
}

void check_resolution(const Vec3& q, double h) {
  const double qn = q.norm();
  if (qn == 0.0) return;
  const double limit = (2.0 * pi / qn) / 20.0;
  if (h > limit) {
    std::ostringstream msg;
    msg << "s step " << h << " too coarse for |p - p'| = " << qn << " (need <= " << limit << ")";
    throw std::invalid_argument(msg.str());
  }
}

cplx integrate(const Quadrature& quad, const Vec3& q, const WorldSheetGrid& grid) {
  cplx sum{};
  for (std::size_t k = 0; k < quad.cols.size(); ++k) {
    const Vec3 x = grid.X(quad.row, quad.cols[k]).tail<3>();
    const double phase = -q.dot(x);
    sum += quad.weights[k] * cplx(std::cos(phase), std::sin(phase));
  }
  return sum;
}

}  // namespace

void KernelConfig::validate() const {
  if (!(epsilon < 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("kernel epsilon must be negative");
  if (!(cutoffScale > 0.0) || !std::isfinite(cutoffScale))
    throw std::invalid_argument("kernel cutoff scale a must be positive");
  if (!(plateauHalfWidth > 0.0) || !std::isfinite(plateauHalfWidth))
    throw std::invalid_argument("form factor half-width R must be positive");
  if (!(tailWidth > 0.0) || !std::isfinite(tailWidth))
    throw std::invalid_argument("form factor tail width must be positive");
}

double KernelConfig::form_factor(double s) const {
  const double u = std::abs(s);
  if (u <= plateauHalfWidth) return 1.0;
  if (u >= plateauHalfWidth + tailWidth) return 0.0;
  return 1.0 - smooth_step((u - plateauHalfWidth) / tailWidth);
}

cplx kernel(const Vec3& p, const Vec3& pPrime, double t, const WorldSheetGrid& grid, const KernelConfig& config) {
  config.validate();
  if (!config.in_cutoff(p) || !config.in_cutoff(pPrime)) return {};
  const Vec3 q = p - pPrime;
  check_resolution(q, grid.lattice.step);
  return config.epsilon * integrate(build_quadrature(t, grid, config), q, grid);
}

std::vector<KernelEntry> kernel_table(const std::vector<Vec3>& momenta, const std::vector<Vec3>& momentaPrime,
                                      double t, const WorldSheetGrid& grid, const KernelConfig& config, Exec exec) {
  config.validate();
  const Quadrature quad = build_quadrature(t, grid, config);
  const std::size_t np = momentaPrime.size();
  std::vector<KernelEntry> out(momenta.size() * np);
  for (std::size_t a = 0; a < momenta.size(); ++a) {
    for (std::size_t b = 0; b < np; ++b) {
      out[a * np + b] = {momenta[a], momentaPrime[b], {}};
      if (config.in_cutoff(momenta[a]) && config.in_cutoff(momentaPrime[b])) {
        check_resolution(momenta[a] - momentaPrime[b], grid.lattice.step);
      }
    }
  }
#pragma omp parallel for schedule(dynamic, 4) if (exec == Exec::parallel)
  for (std::size_t k = 0; k < out.size(); ++k) {
    KernelEntry& e = out[k];
    if (config.in_cutoff(e.p) && config.in_cutoff(e.pPrime)) {
      e.value = config.epsilon * integrate(quad, e.p - e.pPrime, grid);
    }
  }
  return out;
}

}  // namespace cuspsheet
