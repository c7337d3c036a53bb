#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "rcs/vec.hpp"

namespace rcs {

// Orthonormal DCT-II and its inverse (DCT-III), O(n log n) via a radix-2
// complex FFT. n must be a power of two. A plan owns the precomputed twiddle
// and bit-reversal tables; it is immutable after construction and safe to
// share across threads.
class DctPlan {
 public:
  explicit DctPlan(int n);

  int size() const { return n_; }

  // X_k = s_k * sum_j x_j cos(pi (j + 1/2) k / n), s_0 = sqrt(1/n), s_k = sqrt(2/n)
  Vec forward(const Vec& x) const;

  // Inverse of forward (equivalently the adjoint: the transform is orthogonal).
  Vec inverse(const Vec& coeffs) const;

 private:
  void fft(std::vector<std::complex<double>>& a, bool inverse) const;

  int n_;
  std::vector<int> bitrev_;
  std::vector<std::complex<double>> twiddle_;  // exp(-2 pi i k / n), k < n/2
  std::vector<std::complex<double>> quarter_;  // exp(-pi i k / (2n)), k < n
};

bool is_power_of_two(int n);

// Naive O(n^2) references used by tests as independent oracles.
Vec dct2_naive(const Vec& x);
Vec dct3_naive(const Vec& coeffs);

}  // namespace rcs
