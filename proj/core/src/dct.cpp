#include "rcs/dct.hpp"

#include <cmath>

#include "rcs/errors.hpp"

namespace rcs {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

DctPlan::DctPlan(int n) : n_(n) {
  if (!is_power_of_two(n)) {
    throw SpecError("DctPlan: size must be a power of two, got " + std::to_string(n));
  }
  bitrev_.resize(n);
  int log2n = 0;
  while ((1 << log2n) < n) ++log2n;
  for (int i = 0; i < n; ++i) {
    int r = 0;
    for (int b = 0; b < log2n; ++b) r |= ((i >> b) & 1) << (log2n - 1 - b);
    bitrev_[i] = r;
  }
  twiddle_.resize(n / 2 > 0 ? n / 2 : 1);
  for (int k = 0; k < n / 2; ++k) {
    twiddle_[k] = std::polar(1.0, -2.0 * kPi * k / n);
  }
  quarter_.resize(n);
  for (int k = 0; k < n; ++k) {
    quarter_[k] = std::polar(1.0, -kPi * k / (2.0 * n));
  }
}

void DctPlan::fft(std::vector<std::complex<double>>& a, bool inverse) const {
  const int n = n_;
  for (int i = 0; i < n; ++i) {
    const int j = bitrev_[i];
    if (j > i) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    const int half = len >> 1;
    const int stride = n / len;
    for (int start = 0; start < n; start += len) {
      for (int k = 0; k < half; ++k) {
        std::complex<double> w = twiddle_[k * stride];
        if (inverse) w = std::conj(w);
        const std::complex<double> u = a[start + k];
        const std::complex<double> t = w * a[start + k + half];
        a[start + k] = u + t;
        a[start + k + half] = u - t;
      }
    }
  }
  if (inverse) {
    const double inv_n = 1.0 / n;
    for (auto& z : a) z *= inv_n;
  }
}

// Makhoul's length-n mapping: even-index samples go in forward order to the
// front half of u, odd-index samples in reverse order to the back half; then
// C_k = Re(exp(-i pi k / 2n) * FFT(u)_k) is the unscaled DCT-II of x.
Vec DctPlan::forward(const Vec& x) const {
  if (static_cast<int>(x.size()) != n_) throw ShapeError("DctPlan::forward: bad length");
  const int n = n_;
  if (n == 1) return x;
  std::vector<std::complex<double>> u(n);
  for (int j = 0; j < n / 2; ++j) {
    u[j] = x[2 * j];
    u[n - 1 - j] = x[2 * j + 1];
  }
  fft(u, false);
  Vec out(n);
  const double s0 = std::sqrt(1.0 / n);
  const double s = std::sqrt(2.0 / n);
  out[0] = s0 * u[0].real();
  for (int k = 1; k < n; ++k) {
    const std::complex<double> z = quarter_[k] * u[k];
    out[k] = s * z.real();
  }
  return out;
}

Vec DctPlan::inverse(const Vec& coeffs) const {
  if (static_cast<int>(coeffs.size()) != n_) throw ShapeError("DctPlan::inverse: bad length");
  const int n = n_;
  if (n == 1) return coeffs;
  // Undo the orthonormal scaling, rebuild the FFT spectrum from
  // U_k = conj(quarter_k) * (C_k - i C_{n-k}), then invert the sample mapping.
  const double s0 = std::sqrt(static_cast<double>(n));
  const double s = std::sqrt(n / 2.0);
  std::vector<std::complex<double>> u(n);
  u[0] = std::complex<double>(coeffs[0] * s0, 0.0);
  for (int k = 1; k < n; ++k) {
    const std::complex<double> c(coeffs[k] * s, -coeffs[n - k] * s);
    u[k] = std::conj(quarter_[k]) * c;
  }
  fft(u, true);
  Vec out(n);
  for (int j = 0; j < n / 2; ++j) {
    out[2 * j] = u[j].real();
    out[2 * j + 1] = u[n - 1 - j].real();
  }
  return out;
}

Vec dct2_naive(const Vec& x) {
  const int n = static_cast<int>(x.size());
  Vec out(n, 0.0);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += x[j] * std::cos(kPi * (j + 0.5) * k / n);
    out[k] = s * (k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n));
  }
  return out;
}

Vec dct3_naive(const Vec& coeffs) {
  const int n = static_cast<int>(coeffs.size());
  Vec out(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
      const double sk = (k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n));
      s += sk * coeffs[k] * std::cos(kPi * (j + 0.5) * k / n);
    }
    out[j] = s;
  }
  return out;
}

}  // namespace rcs
