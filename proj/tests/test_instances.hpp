#pragma once

#include "sfe/core.hpp"
#include "sfe/driver.hpp"

// Shared fixtures: the bundled 3x5 demo instance and a few seeded sizes.

namespace sfe::test {

inline Matrix demo_matrix() { return small_demo_matrix(); }
inline Vector demo_rhs() { return small_demo_rhs(); }

// Frozen reference values for the demo instance (independently derived by
// support enumeration and verified against the enumeration oracle in-tree).
inline Vector demo_x_star() {
  Vector x(5);
  x << 0.0, 0.0, 0.9343434343434344, 0.0, 0.5454545454545454;
  return x;
}

inline Vector demo_nu_star() {
  Vector nu(3);
  nu << 0.06565656565656566, 0.025252525252525252, 0.010101010101010102;
  return nu;
}

constexpr double demo_spectral_norm = 14.704312706415039;  // verified vs SVD

}  // namespace sfe::test
