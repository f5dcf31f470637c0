#include "cuspsheet/lattice.hpp"

#include <cmath>
#include <stdexcept>

namespace cuspsheet {

namespace {

long round_down(double x, double step) {
  const double r = x / step;
  const double n = std::round(r);
  return std::abs(r - n) < 1e-9 ? static_cast<long>(n) : static_cast<long>(std::floor(r));
}

long round_up(double x, double step) {
  const double r = x / step;
  const double n = std::round(r);
  return std::abs(r - n) < 1e-9 ? static_cast<long>(n) : static_cast<long>(std::ceil(r));
}

}  // namespace

LatticeSpec LatticeSpec::from_ranges(double tMin, double tMax, double sMin, double sMax, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("lattice step must be positive");
  if (!(tMin <= tMax) || !(sMin <= sMax)) throw std::invalid_argument("lattice ranges must be non-empty");
  LatticeSpec spec;
  spec.step = step;
  spec.tFirst = round_down(tMin, step);
  spec.tLast = round_up(tMax, step);
  spec.sFirst = round_down(sMin, step);
  spec.sLast = round_up(sMax, step);
  return spec;
}

}  // namespace cuspsheet
