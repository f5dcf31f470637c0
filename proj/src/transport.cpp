#include "cuspsheet/transport.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cuspsheet {

namespace {

long floor_index(double x, double step) {
  const double r = x / step;
  const double n = std::round(r);
  return std::abs(r - n) < 1e-9 ? static_cast<long>(n) : static_cast<long>(std::floor(r));
}

long ceil_index(double x, double step) {
  const double r = x / step;
  const double n = std::round(r);
  return std::abs(r - n) < 1e-9 ? static_cast<long>(n) : static_cast<long>(std::ceil(r));
}

// One step from xi to xi + h (h may be negative).
Matrix2C advance(const Matrix2C& t, const ChiralProfile& profile, Chirality chirality, double xi, double h,
                 StepScheme scheme) {
  if (scheme == StepScheme::explicit_euler) {
    return t - h * (q_matrix(profile(xi), chirality) * t);
  }
  const cplx rho = profile(xi + 0.5 * h);
  if (rho == cplx{}) return t;
  return transport_step(rho, h, chirality) * t;
}

}  // namespace

TransportSolution::TransportSolution(Chirality chirality, double step, long firstIndex,
                                     std::vector<Matrix2C> samples, Matrix2C initial, ChiralProfile profile)
    : chirality_(chirality),
      step_(step),
      first_(firstIndex),
      samples_(std::move(samples)),
      initial_(initial),
      profile_(std::move(profile)) {
  if (samples_.empty()) throw std::invalid_argument("transport solution needs at least one sample");
}

const Matrix2C& TransportSolution::at_index(long k) const {
  if (!covers_index(k)) {
    std::ostringstream msg;
    msg << "xi index " << k << " outside transport grid [" << first_ << ", " << last_index() << "]";
    throw std::out_of_range(msg.str());
  }
  return samples_[static_cast<std::size_t>(k - first_)];
}

bool TransportSolution::covers(double lo, double hi) const {
  const double slack = 1e-9 * step_;
  return lo >= grid_start() - slack && hi <= grid_end() + slack;
}

Matrix2C TransportSolution::evaluate(double xi) const {
  if (!covers(xi, xi)) {
    std::ostringstream msg;
    msg << "xi = " << xi << " outside transport grid [" << grid_start() << ", " << grid_end() << "]";
    throw std::out_of_range(msg.str());
  }
  const long k = std::clamp(static_cast<long>(std::lround(xi / step_)), first_, last_index());
  const double delta = xi - this->xi(k);
  Matrix2C t = samples_[static_cast<std::size_t>(k - first_)];
  if (std::abs(delta) < 1e-15 * std::max(1.0, std::abs(xi))) return t;
  const int substeps = std::max(1, static_cast<int>(std::ceil(8.0 * std::abs(delta) / step_)));
  const double h = delta / substeps;
  double x = this->xi(k);
  for (int n = 0; n < substeps; ++n, x += h) {
    t = advance(t, profile_, chirality_, x, h, StepScheme::magnus_midpoint);
  }
  return t;
}

Matrix2C TransportSolution::derivative(double xi) const {
  return -q_matrix(profile_(xi), chirality_) * evaluate(xi);
}

TransportSolution integrate_transport(const ChiralProfile& profile, Chirality chirality, double xiMin,
                                      double xiMax, double step, const Matrix2C& initial, StepScheme scheme) {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("transport step must be positive");
  if (!(xiMin <= xiMax)) throw std::invalid_argument("transport range is empty");
  if (!is_su2(initial, 1e-10)) {
    std::ostringstream msg;
    msg << "initial matrix is not in SU(2): |T^H T - I| = " << unitarity_defect(initial)
        << ", |det T - 1| = " << determinant_defect(initial);
    throw std::invalid_argument(msg.str());
  }
  const long first = std::min(0L, floor_index(xiMin, step));
  const long last = std::max(0L, ceil_index(xiMax, step));
  std::vector<Matrix2C> samples(static_cast<std::size_t>(last - first + 1));
  const auto slot = [&](long k) -> Matrix2C& { return samples[static_cast<std::size_t>(k - first)]; };

  slot(0) = initial;
  for (long k = 0; k < last; ++k) {
    slot(k + 1) = advance(slot(k), profile, chirality, static_cast<double>(k) * step, step, scheme);
  }
  for (long k = 0; k > first; --k) {
    slot(k - 1) = advance(slot(k), profile, chirality, static_cast<double>(k) * step, -step, scheme);
  }
  return TransportSolution(chirality, step, first, std::move(samples), initial, profile);
}

NullVector null_vector(const Matrix2C& t, Chirality chirality) {
  const int row = chirality == Chirality::plus ? 0 : 1;
  const cplx a = t(row, 0);
  const cplx b = t(row, 1);
  const cplx c = a * std::conj(b);
  return {0.5, -c.real(), -c.imag(), 0.5 * (std::norm(b) - std::norm(a))};
}

}  // namespace cuspsheet
