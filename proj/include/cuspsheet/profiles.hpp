#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "cuspsheet/common.hpp"

namespace cuspsheet {

// One C-infinity compact bump: amplitude * exp(1 - 1/(1 - u^2)), u = (xi - center)/width.
struct Bump {
  double center = 0.0;
  double width = 1.0;
  cplx amplitude{0.0, 0.0};
};

// Chiral data rho(xi) as a finite sum of bumps. Immutable once built.
class ChiralProfile {
 public:
  ChiralProfile() = default;
  explicit ChiralProfile(std::vector<Bump> terms);

  cplx operator()(double xi) const;

  std::span<const Bump> terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  // Upper bound on |rho| (sum of |amplitude|).
  double magnitude_bound() const;

  // Convex hull of the supports; {0, 0} for the empty profile.
  std::pair<double, double> support_hull() const;

  // True when every term has a real amplitude (Im rho == 0 everywhere).
  bool is_real() const;

  friend ChiralProfile operator+(const ChiralProfile& a, const ChiralProfile& b);

 private:
  std::vector<Bump> terms_;
};

using ProfileFunction = std::function<cplx(double)>;

ChiralProfile make_bump(double center, double width, cplx amplitude);

struct ProfilePair {
  ChiralProfile plus;
  ChiralProfile minus;
};

// Both chiralities vanish on [-b, b]. Each side carries a narrow edge bump of
// width `edgeWidth` touching the gap plus a body bump filling [b, 2b]; the edge
// bump controls how sharply |rho| rises at the gap boundary. Left-side amplitude is
// outerAmplitude, right side i * outerAmplitude.
ProfilePair make_gapped_pair(double gapHalfWidth, cplx outerAmplitude);
ProfilePair make_gapped_pair(double gapHalfWidth, cplx outerAmplitude, double edgeWidth);

cplx evaluate(const ChiralProfile& profile, double xi);

inline ProfileFunction as_function(ChiralProfile profile) {
  return [p = std::move(profile)](double xi) { return p(xi); };
}

}  // namespace cuspsheet
