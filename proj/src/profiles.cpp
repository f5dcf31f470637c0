#include "cuspsheet/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cuspsheet {

namespace {

void check_bump(const Bump& b) {
  if (!(b.width > 0.0) || !std::isfinite(b.width)) {
    throw std::invalid_argument("bump width must be positive, got " + std::to_string(b.width));
  }
  if (!std::isfinite(b.center) || !std::isfinite(b.amplitude.real()) || !std::isfinite(b.amplitude.imag())) {
    throw std::invalid_argument("bump parameters must be finite");
  }
}

}  // namespace

ChiralProfile::ChiralProfile(std::vector<Bump> terms) : terms_(std::move(terms)) {
  for (const auto& b : terms_) check_bump(b);
}

cplx ChiralProfile::operator()(double xi) const {
  cplx sum{0.0, 0.0};
  for (const auto& b : terms_) {
    const double u = (xi - b.center) / b.width;
    const double q = 1.0 - u * u;
    if (q <= 0.0) continue;
    sum += b.amplitude * std::exp(1.0 - 1.0 / q);
  }
  return sum;
}

double ChiralProfile::magnitude_bound() const {
  double m = 0.0;
  for (const auto& b : terms_) m += std::abs(b.amplitude);
  return m;
}

std::pair<double, double> ChiralProfile::support_hull() const {
  if (terms_.empty()) return {0.0, 0.0};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& b : terms_) {
    lo = std::min(lo, b.center - b.width);
    hi = std::max(hi, b.center + b.width);
  }
  return {lo, hi};
}

bool ChiralProfile::is_real() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const Bump& b) { return b.amplitude.imag() == 0.0; });
}

ChiralProfile operator+(const ChiralProfile& a, const ChiralProfile& b) {
  std::vector<Bump> terms(a.terms_.begin(), a.terms_.end());
  terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
  return ChiralProfile(std::move(terms));
}

ChiralProfile make_bump(double center, double width, cplx amplitude) {
  return ChiralProfile({Bump{center, width, amplitude}});
}

ProfilePair make_gapped_pair(double gapHalfWidth, cplx outerAmplitude) {
  return make_gapped_pair(gapHalfWidth, outerAmplitude, gapHalfWidth / 20.0);
}

ProfilePair make_gapped_pair(double gapHalfWidth, cplx outerAmplitude, double edgeWidth) {
  const double b = gapHalfWidth;
  if (!(b > 0.0)) throw std::invalid_argument("gap half-width must be positive");
  if (!(edgeWidth > 0.0) || edgeWidth > b / 2.0) {
    throw std::invalid_argument("edge width must lie in (0, b/2]");
  }
  // The right side is rotated by i: a profile with rho(-xi) = rho(xi) would also
  // freeze the s = 0 line onto a cusp for all t.
  std::vector<Bump> terms;
  for (double side : {-1.0, 1.0}) {
    const cplx amp = side < 0.0 ? outerAmplitude : cplx(0.0, 1.0) * outerAmplitude;
    terms.push_back({side * (b + edgeWidth), edgeWidth, amp});
    terms.push_back({side * 1.5 * b, 0.5 * b, amp});
  }
  ChiralProfile p(terms);
  return {p, p};
}

cplx evaluate(const ChiralProfile& profile, double xi) { return profile(xi); }

}  // namespace cuspsheet
