#pragma once

#include <cmath>
#include <span>

#include "tat/geometry.hpp"

namespace tat::test {

// Coarse geometry that keeps each operator call in the millisecond range.
inline GeometryConfig small_config() {
  GeometryConfig c;
  c.n_image = 65;
  c.n_theta = 64;
  c.n_time = 65;
  c.T = 2.5;
  return c;
}

inline double rel_l2(std::span<const double> a, std::span<const double> b) {
  double d = 0.0, n = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += (a[i] - b[i]) * (a[i] - b[i]);
    n += b[i] * b[i];
  }
  return std::sqrt(d / n);
}

inline double norm2(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

}  // namespace tat::test
