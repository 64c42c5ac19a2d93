#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

// Counter-based deterministic generator for synthetic data. Every draw is a
// pure function of (seed, counter), so streams reproduce bit-for-bit across
// platforms and runs — std::normal_distribution is implementation-defined
// and would break cross-platform goldens.
//
// word k    = splitmix64 finalizer of (seed + (k+1) * 0x9E3779B97F4A7C15)
// uniform   = (word >> 11) * 2^-53                  in [0, 1)
// normals   = Box-Muller pairs, u1 in (0, 1], u2 in [0, 1); each fill starts
//             a fresh pair (an odd-count fill discards its half-used pair).

namespace sfe {

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_word() {
    std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform on [0, 1)
  double uniform() {
    return static_cast<double>(next_word() >> 11) * 0x1.0p-53;
  }

  // count standard normals into dst (dense storage order)
  void fill_normals(double* dst, Eigen::Index count) {
    constexpr double two_pi = 6.283185307179586;
    Eigen::Index j = 0;
    while (j < count) {
      const double u1 = static_cast<double>((next_word() >> 11) + 1) * 0x1.0p-53;
      const double u2 = uniform();
      const double rad = std::sqrt(-2.0 * std::log(u1));
      const double ang = two_pi * u2;
      dst[j++] = rad * std::cos(ang);
      if (j < count) dst[j++] = rad * std::sin(ang);
    }
  }

  Eigen::MatrixXd normal_matrix(Eigen::Index m, Eigen::Index n) {
    Eigen::MatrixXd A(m, n);  // column-major, filled in storage order
    fill_normals(A.data(), m * n);
    return A;
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace sfe
