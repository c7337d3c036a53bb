#include "rcs/signals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rcs/errors.hpp"
#include "rcs/rng.hpp"

namespace rcs {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

NoiseSpec NoiseSpec::none() {
  NoiseSpec s;
  s.kind = NoiseKind::None;
  return s;
}

NoiseSpec NoiseSpec::gaussian(double snr) {
  NoiseSpec s;
  s.kind = NoiseKind::Gaussian;
  s.snr_db = snr;
  return s;
}

NoiseSpec NoiseSpec::gmm(double xi, double kappa, double snr) {
  NoiseSpec s;
  s.kind = NoiseKind::Gmm;
  s.xi = xi;
  s.kappa = kappa;
  s.snr_db = snr;
  s.validate();
  return s;
}

NoiseSpec NoiseSpec::sas(double alpha, double gamma_disp) {
  NoiseSpec s;
  s.kind = NoiseKind::Sas;
  s.alpha = alpha;
  s.gamma_disp = gamma_disp;
  s.validate();
  return s;
}

void NoiseSpec::validate() const {
  switch (kind) {
    case NoiseKind::None:
    case NoiseKind::Gaussian:
      return;
    case NoiseKind::Gmm:
      if (!(xi >= 0.0 && xi < 1.0)) throw SpecError("gmm noise: xi must lie in [0,1)");
      if (!(kappa > 1.0)) throw SpecError("gmm noise: kappa must exceed 1");
      return;
    case NoiseKind::Sas:
      if (!(alpha > 0.0 && alpha <= 2.0)) throw SpecError("sas noise: alpha must lie in (0,2]");
      if (!(gamma_disp > 0.0)) throw SpecError("sas noise: dispersion must be positive");
      return;
  }
  throw SpecError("noise: unknown kind");
}

std::string NoiseSpec::name() const {
  switch (kind) {
    case NoiseKind::None: return "none";
    case NoiseKind::Gaussian: return "gaussian";
    case NoiseKind::Gmm: return "gmm";
    case NoiseKind::Sas: return "sas";
  }
  return "?";
}

Vec gen_sparse_signal(const SignalSpec& spec) {
  if (spec.n <= 0) throw SpecError("signal: n must be positive");
  if (spec.sparsity <= 0 || spec.sparsity > spec.n) {
    throw SpecError("signal: sparsity must lie in [1, n]");
  }
  Rng support_rng(derive_seed(spec.seed, {stream_tag(Stream::Support)}));
  std::vector<int> idx(spec.n);
  for (int i = 0; i < spec.n; ++i) idx[i] = i;
  for (int i = 0; i < spec.sparsity; ++i) {
    const int j =
        i + static_cast<int>(support_rng.next_u64() % static_cast<std::uint64_t>(spec.n - i));
    std::swap(idx[i], idx[j]);
  }

  Rng amp_rng(derive_seed(spec.seed, {stream_tag(Stream::Amplitude)}));
  Vec x(spec.n, 0.0);
  for (int i = 0; i < spec.sparsity; ++i) x[idx[i]] = amp_rng.normal();
  const double nrm = nrm2(x);
  if (nrm == 0.0) throw SpecError("signal: degenerate draw");
  for (auto& v : x) v /= nrm;
  return x;
}

namespace {

// Chambers-Mallows-Stuck sampler for a symmetric alpha-stable variate with
// unit dispersion; U uniform on (-pi/2, pi/2), W standard exponential.
double sas_standard(Rng& rng, double alpha) {
  const double u = rng.uniform01();
  const double U = kPi * (u - 0.5);
  if (alpha == 1.0) return std::tan(U);
  const double W = rng.exponential();
  const double s = std::sin(alpha * U) / std::pow(std::cos(U), 1.0 / alpha);
  const double c = std::pow(std::cos(U - alpha * U) / W, (1.0 - alpha) / alpha);
  return s * c;
}

}  // namespace

Vec gen_noise(const NoiseSpec& spec, int m, const Vec& signal_image, std::uint64_t seed) {
  if (m < 1) throw SpecError("noise: m must be >= 1");
  spec.validate();
  Vec n(m, 0.0);
  if (spec.kind == NoiseKind::None) return n;

  Rng rng(derive_seed(seed, {stream_tag(Stream::Noise)}));

  if (spec.kind == NoiseKind::Sas) {
    for (int i = 0; i < m; ++i) n[i] = spec.gamma_disp * sas_standard(rng, spec.alpha);
    return n;
  }

  if (static_cast<int>(signal_image.size()) != m) {
    throw ShapeError("noise: signal_image must have length m for SNR calibration");
  }
  const double mu = mean(signal_image);
  double centered = 0.0;
  for (double v : signal_image) centered += (v - mu) * (v - mu);
  const double xi = (spec.kind == NoiseKind::Gmm) ? spec.xi : 0.0;
  const double kappa = (spec.kind == NoiseKind::Gmm) ? spec.kappa : 1.0;
  // E||n||^2 = m sigma^2 (1 - xi + xi kappa) matched to the target SNR.
  const double target_power = centered * std::pow(10.0, -spec.snr_db / 10.0);
  const double sigma2 = target_power / (m * (1.0 - xi + xi * kappa));
  const double sigma = std::sqrt(sigma2);
  const double sigma_out = std::sqrt(kappa) * sigma;
  for (int i = 0; i < m; ++i) {
    const double branch = rng.uniform01();
    const double z = rng.normal();
    n[i] = (branch < xi ? sigma_out : sigma) * z;
  }
  return n;
}

double snr_db(const Vec& signal_image, const Vec& noise) {
  if (signal_image.size() != noise.size()) throw ShapeError("snr_db: length mismatch");
  const double nn = nrm2(noise);
  if (nn == 0.0) return std::numeric_limits<double>::infinity();
  const double mu = mean(signal_image);
  double centered = 0.0;
  for (double v : signal_image) centered += (v - mu) * (v - mu);
  return 20.0 * std::log10(std::sqrt(centered) / nn);
}

double relative_error(const Vec& x_hat, const Vec& x_true) {
  if (x_hat.size() != x_true.size()) throw ShapeError("relative_error: length mismatch");
  const double denom = nrm2(x_true);
  if (denom == 0.0) throw SpecError("relative_error: zero reference signal");
  return dist2(x_hat, x_true) / denom;
}

bool is_success(const Vec& x_hat, const Vec& x_true) {
  return relative_error(x_hat, x_true) <= kSuccessThreshold;
}

double psnr_db(const Vec& estimate, const Vec& reference) {
  if (estimate.size() != reference.size()) throw ShapeError("psnr_db: size mismatch");
  if (reference.empty()) throw SpecError("psnr_db: empty image");
  double peak = 0.0;
  double mse = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    peak = std::max(peak, reference[i]);
    const double d = estimate[i] - reference[i];
    mse += d * d;
  }
  mse /= static_cast<double>(reference.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

}  // namespace rcs
