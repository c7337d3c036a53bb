#pragma once

#include <cstdint>
#include <string>

#include "rcs/vec.hpp"

namespace rcs {

enum class NoiseKind { None, Gaussian, Gmm, Sas };

// Measurement-noise description. Gaussian and the two-term Gaussian mixture
// are calibrated to a target SNR; symmetric alpha-stable noise carries no
// SNR (infinite variance for alpha < 2) and is scaled by its dispersion.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::Gaussian;
  double snr_db = 30.0;     // Gaussian, Gmm
  double xi = 0.1;          // Gmm: outlier fraction, in [0,1)
  double kappa = 1000.0;    // Gmm: outlier variance multiplier, > 1
  double alpha = 1.0;       // SaS: characteristic exponent, in (0,2]
  double gamma_disp = 1e-4; // SaS: dispersion, > 0

  static NoiseSpec none();
  static NoiseSpec gaussian(double snr_db);
  static NoiseSpec gmm(double xi, double kappa, double snr_db);
  static NoiseSpec sas(double alpha, double gamma_disp);

  void validate() const;
  std::string name() const;
};

struct SignalSpec {
  int n = 512;
  int sparsity = 10;
  std::uint64_t seed = 0;
};

// K-sparse vector: support uniform without replacement, amplitudes standard
// Gaussian, rescaled to unit l2 norm. Deterministic per seed.
Vec gen_sparse_signal(const SignalSpec& spec);

// Noise vector of length m. Gaussian/Gmm sigma is set analytically from the
// mixture second moment so that the expected noise power matches the target
// SNR relative to the mean-removed signal_image (= A x0). SaS samples come
// from the Chambers-Mallows-Stuck transform.
Vec gen_noise(const NoiseSpec& spec, int m, const Vec& signal_image, std::uint64_t seed);

// 20 log10(||s - mean(s)|| / ||n||); +infinity when the noise is zero.
double snr_db(const Vec& signal_image, const Vec& noise);

double relative_error(const Vec& x_hat, const Vec& x_true);
bool is_success(const Vec& x_hat, const Vec& x_true);
inline constexpr double kSuccessThreshold = 1e-2;

// 10 log10(MAX^2 / MSE) with MAX the reference peak; +infinity when equal.
double psnr_db(const Vec& estimate, const Vec& reference);

}  // namespace rcs
