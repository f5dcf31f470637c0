#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace cuspsheet {

// Uniform (t, s) lattice with dt = ds = step, aligned to the origin so that
// every lattice point maps onto xi samples: xi_plus index = (t index) + (s index),
// xi_minus index = (s index) - (t index).
struct LatticeSpec {
  double step = 0.01;
  long tFirst = 0;
  long tLast = 0;
  long sFirst = 0;
  long sLast = 0;

  // Rounds the ranges outward to multiples of step.
  static LatticeSpec from_ranges(double tMin, double tMax, double sMin, double sMax, double step);

  std::size_t nt() const { return static_cast<std::size_t>(tLast - tFirst + 1); }
  std::size_t ns() const { return static_cast<std::size_t>(sLast - sFirst + 1); }

  double t(std::size_t i) const { return static_cast<double>(tFirst + static_cast<long>(i)) * step; }
  double s(std::size_t j) const { return static_cast<double>(sFirst + static_cast<long>(j)) * step; }

  long plus_index(std::size_t i, std::size_t j) const {
    return tFirst + static_cast<long>(i) + sFirst + static_cast<long>(j);
  }
  long minus_index(std::size_t i, std::size_t j) const {
    return sFirst + static_cast<long>(j) - tFirst - static_cast<long>(i);
  }

  long plus_min() const { return tFirst + sFirst; }
  long plus_max() const { return tLast + sLast; }
  long minus_min() const { return sFirst - tLast; }
  long minus_max() const { return sLast - tFirst; }
};

// Row-major nt x ns field.
template <class T>
class Field2D {
 public:
  Field2D() = default;
  Field2D(std::size_t nt, std::size_t ns, T value = T{}) : nt_(nt), ns_(ns), data_(nt * ns, value) {}

  std::size_t nt() const { return nt_; }
  std::size_t ns() const { return ns_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * ns_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * ns_ + j]; }

  const std::vector<T>& data() const { return data_; }

 private:
  std::size_t nt_ = 0;
  std::size_t ns_ = 0;
  std::vector<T> data_;
};

using Mask2D = Field2D<std::uint8_t>;

}  // namespace cuspsheet
