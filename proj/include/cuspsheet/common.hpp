#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cuspsheet {

using cplx = std::complex<double>;
using Matrix2C = Eigen::Matrix2cd;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;

inline constexpr double pi = std::numbers::pi;

enum class Chirality { plus, minus };

// Selects the OpenMP kernel or the single-threaded path of the same loop.
enum class Exec { serial, parallel };

inline const char* to_string(Chirality c) { return c == Chirality::plus ? "plus" : "minus"; }

// Signature (+,-,-,-).
inline double minkowski_dot(const Vec4& a, const Vec4& b) {
  return a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3];
}

// Raised where a phase (arg of a vanishing quantity) would be required.
class PhaseUndefined : public std::domain_error {
 public:
  explicit PhaseUndefined(const std::string& what) : std::domain_error("phase undefined: " + what) {}
};

}  // namespace cuspsheet
