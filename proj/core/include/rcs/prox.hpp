#pragma once

#include <string>

#include "rcs/vec.hpp"

namespace rcs {

enum class PenaltyKind { Hard, Soft, Lq, Scad, Mc };

// Sparsity penalty P(.) with its parameters. Construct through the named
// factories; validate() enforces the parameter ranges.
struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::Soft;
  double q = 0.5;       // Lq: exponent in (0,1)
  double lambda = 1.0;  // Scad, Mc: threshold level, > 0
  double a = 3.7;       // Scad: > 2
  double gamma = 2.0;   // Mc: > 1

  static PenaltySpec hard();
  static PenaltySpec soft();
  static PenaltySpec lq(double q);
  static PenaltySpec scad(double lambda, double a);
  static PenaltySpec mc(double lambda, double gamma);

  void validate() const;
  bool is_convex() const { return kind == PenaltyKind::Soft; }
  std::string name() const;
};

// Sum of per-coordinate penalty values P(x_i). The hard variant counts
// nonzeros (it is the penalty whose proximity operator is hard thresholding
// at sqrt(2/eta) for every eta).
double penalty_value(const PenaltySpec& p, const Vec& x);
double penalty_scalar(const PenaltySpec& p, double x);

// prox_{P,eta}(t) = argmin_x P(x) + (eta/2)(x - t)^2. Odd in t by
// construction. The Lq variant solves its scalar root problem by a
// safeguarded Newton iteration (bisection fallback after 100 steps).
double prox_scalar(const PenaltySpec& p, double t, double eta);

Vec prox_vector(const PenaltySpec& p, const Vec& t, double eta);

// Brute-force minimizer of P(x) + (eta/2)(x - t)^2: coarse grid over
// [-half_width, half_width] followed by three rounds of 10x local
// refinement around the incumbent. Entirely independent of prox_scalar;
// this is the ground truth the closed forms are tested against.
double prox_oracle(const PenaltySpec& p, double t, double eta, double half_width,
                   int coarse_points = 4001);

// Lq thresholds of the closed-form solution: below tau the prox is zero,
// at tau the minimizer set is {0, sign(t)*beta} (ties resolved to 0).
double lq_beta(double q, double eta);
double lq_tau(double q, double eta);

// Location of the prox jump for the given parameters, or a negative value
// if the map is continuous there. Tests use this to widen tolerances near
// discontinuities.
double prox_jump_threshold(const PenaltySpec& p, double eta);

}  // namespace rcs
