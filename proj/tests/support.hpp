#pragma once

// Shared fixtures and independent oracles for the test binaries.

#include <cmath>
#include <random>
#include <vector>

#include "cuspsheet/capture_kernel.hpp"
#include "cuspsheet/cusps.hpp"
#include "cuspsheet/gaussfields.hpp"
#include "cuspsheet/profiles.hpp"
#include "cuspsheet/reference.hpp"
#include "cuspsheet/transport.hpp"
#include "cuspsheet/worldsheet.hpp"

namespace testsupport {

using namespace cuspsheet;

// Matrix exponential by scaling and squaring of a truncated Taylor series.
// Deliberately shares nothing with the closed form used by the library.
inline Matrix2C expm_taylor(const Matrix2C& a) {
  int squarings = 0;
  double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > 0.25) {
    norm *= 0.5;
    ++squarings;
  }
  const Matrix2C b = a / std::pow(2.0, squarings);
  Matrix2C term = Matrix2C::Identity();
  Matrix2C sum = Matrix2C::Identity();
  for (int k = 1; k < 30; ++k) {
    term = term * b / static_cast<double>(k);
    sum += term;
  }
  for (int k = 0; k < squarings; ++k) sum = sum * sum;
  return sum;
}

// [[cos x, sin x], [-sin x, cos x]]
inline Matrix2C rotation(double x) {
  Matrix2C r;
  r << std::cos(x), std::sin(x), -std::sin(x), std::cos(x);
  return r;
}

// Composite Simpson with n (even) panels.
template <class F>
double simpson(F f, double a, double b, int n = 2000) {
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int k = 1; k < n; ++k) sum += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return sum * h / 3.0;
}

inline double order(double coarse, double fine) { return std::log2(coarse / fine); }

struct Sheet {
  TransportSolution plus;
  TransportSolution minus;
  WorldSheetGrid grid;
};

inline Sheet make_sheet(const ChiralProfile& rp, const ChiralProfile& rm, const LatticeSpec& l,
                        const Matrix2C& initPlus = Matrix2C::Identity(),
                        const Matrix2C& initMinus = Matrix2C::Identity(), double kappa = 1.0,
                        const Vec4& base = Vec4::Zero(), StepScheme scheme = StepScheme::magnus_midpoint) {
  const double h = l.step;
  auto tp = integrate_transport(rp, Chirality::plus, l.plus_min() * h, l.plus_max() * h, h, initPlus, scheme);
  auto tm = integrate_transport(rm, Chirality::minus, l.minus_min() * h, l.minus_max() * h, h, initMinus, scheme);
  auto g = reconstruct(tp, tm, kappa, base, l);
  return {std::move(tp), std::move(tm), std::move(g)};
}

// Two to three smooth bumps per chirality, moderate amplitudes, supports around the origin.
inline ProfilePair random_profiles(std::mt19937_64& rng, double maxAmplitude = 1.2) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> count(2, 3);
  auto one = [&] {
    std::vector<Bump> b;
    const int n = count(rng);
    for (int k = 0; k < n; ++k) {
      const double amp = maxAmplitude * std::abs(u(rng));
      const double arg = pi * u(rng);
      b.push_back({0.4 * u(rng), 0.7 + 0.3 * std::abs(u(rng)), std::polar(amp, arg)});
    }
    return ChiralProfile(std::move(b));
  };
  ProfilePair p;
  p.plus = one();
  p.minus = one();
  return p;
}

inline double max_abs_diff(const Matrix2C& a, const Matrix2C& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace testsupport
