#include "rcs/prox.hpp"

#include <algorithm>
#include <cmath>

#include "rcs/errors.hpp"

namespace rcs {

PenaltySpec PenaltySpec::hard() {
  PenaltySpec p;
  p.kind = PenaltyKind::Hard;
  return p;
}

PenaltySpec PenaltySpec::soft() {
  PenaltySpec p;
  p.kind = PenaltyKind::Soft;
  return p;
}

PenaltySpec PenaltySpec::lq(double q) {
  PenaltySpec p;
  p.kind = PenaltyKind::Lq;
  p.q = q;
  p.validate();
  return p;
}

PenaltySpec PenaltySpec::scad(double lambda, double a) {
  PenaltySpec p;
  p.kind = PenaltyKind::Scad;
  p.lambda = lambda;
  p.a = a;
  p.validate();
  return p;
}

PenaltySpec PenaltySpec::mc(double lambda, double gamma) {
  PenaltySpec p;
  p.kind = PenaltyKind::Mc;
  p.lambda = lambda;
  p.gamma = gamma;
  p.validate();
  return p;
}

void PenaltySpec::validate() const {
  switch (kind) {
    case PenaltyKind::Hard:
    case PenaltyKind::Soft:
      return;
    case PenaltyKind::Lq:
      if (!(q > 0.0 && q < 1.0)) {
        throw SpecError("lq penalty: q must lie in (0,1); q=1 is soft, q=0 is hard");
      }
      return;
    case PenaltyKind::Scad:
      if (!(lambda > 0.0)) throw SpecError("scad penalty: lambda must be positive");
      if (!(a > 2.0)) throw SpecError("scad penalty: a must exceed 2");
      return;
    case PenaltyKind::Mc:
      if (!(lambda > 0.0)) throw SpecError("mc penalty: lambda must be positive");
      if (!(gamma > 1.0)) throw SpecError("mc penalty: gamma must exceed 1");
      return;
  }
  throw SpecError("penalty: unknown kind");
}

std::string PenaltySpec::name() const {
  switch (kind) {
    case PenaltyKind::Hard: return "hard";
    case PenaltyKind::Soft: return "soft";
    case PenaltyKind::Lq: return "lq";
    case PenaltyKind::Scad: return "scad";
    case PenaltyKind::Mc: return "mc";
  }
  return "?";
}

double penalty_scalar(const PenaltySpec& p, double x) {
  const double ax = std::fabs(x);
  switch (p.kind) {
    case PenaltyKind::Hard:
      return ax > 0.0 ? 1.0 : 0.0;
    case PenaltyKind::Soft:
      return ax;
    case PenaltyKind::Lq:
      return ax == 0.0 ? 0.0 : std::pow(ax, p.q);
    case PenaltyKind::Scad: {
      const double l = p.lambda, a = p.a;
      if (ax < l) return l * ax;
      if (ax < a * l) return (2.0 * a * l * ax - ax * ax - l * l) / (2.0 * (a - 1.0));
      return (a + 1.0) * l * l / 2.0;
    }
    case PenaltyKind::Mc: {
      // lambda * integral_0^{|x|} max(1 - s/(gamma*lambda), 0) ds in closed form:
      // quadratic below gamma*lambda, constant gamma*lambda^2/2 above.
      const double l = p.lambda, g = p.gamma;
      if (ax <= g * l) return l * ax - ax * ax / (2.0 * g);
      return g * l * l / 2.0;
    }
  }
  throw SpecError("penalty: unknown kind");
}

double penalty_value(const PenaltySpec& p, const Vec& x) {
  p.validate();
  double s = 0.0;
  for (double v : x) s += penalty_scalar(p, v);
  return s;
}

double lq_beta(double q, double eta) { return std::pow(2.0 * (1.0 - q) / eta, 1.0 / (2.0 - q)); }

double lq_tau(double q, double eta) {
  const double beta = lq_beta(q, eta);
  return beta + q * std::pow(beta, q - 1.0) / eta;
}

namespace {

// Root of h(y) = q y^{q-1} + eta y - eta t = 0 on (beta, t), for t > tau.
// h is convex and increasing there, h(beta) < 0 < h(t). Newton from the right
// endpoint, kept inside a shrinking bracket; bisection after 100 steps.
double lq_positive_root(double q, double eta, double t, double beta) {
  const double tol = 1e-11 * eta * (1.0 + t);
  auto h = [&](double y) { return q * std::pow(y, q - 1.0) + eta * y - eta * t; };
  double lo = beta, hi = t;
  double y = t;
  for (int it = 0; it < 100; ++it) {
    const double hy = h(y);
    if (std::fabs(hy) <= tol) return y;
    if (hy > 0.0) hi = y; else lo = y;
    const double dh = q * (q - 1.0) * std::pow(y, q - 2.0) + eta;
    double ynext = (dh > 0.0) ? y - hy / dh : 0.5 * (lo + hi);
    if (!(ynext > lo && ynext < hi)) ynext = 0.5 * (lo + hi);
    y = ynext;
  }
  // Bisection fallback; h is monotone on the bracket.
  for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + t); ++it) {
    y = 0.5 * (lo + hi);
    const double hy = h(y);
    if (std::fabs(hy) <= tol) return y;
    if (hy > 0.0) hi = y; else lo = y;
  }
  return 0.5 * (lo + hi);
}

double prox_abs(const PenaltySpec& p, double t, double eta);

// Closed forms valid only under a curvature condition get checked here and
// routed to the brute-force oracle when the condition fails.
double oracle_fallback(const PenaltySpec& p, double t, double eta) {
  return prox_oracle(p, t, eta, t + 1.0, 4001);
}

double prox_abs(const PenaltySpec& p, double t, double eta) {
  // t >= 0 here; odd extension happens in prox_scalar.
  switch (p.kind) {
    case PenaltyKind::Hard:
      return t > std::sqrt(2.0 / eta) ? t : 0.0;
    case PenaltyKind::Soft:
      return std::max(t - 1.0 / eta, 0.0);
    case PenaltyKind::Lq: {
      const double beta = lq_beta(p.q, eta);
      const double tau = beta + p.q * std::pow(beta, p.q - 1.0) / eta;
      if (t <= tau) return 0.0;  // tie at t == tau resolved to 0
      return lq_positive_root(p.q, eta, t, beta);
    }
    case PenaltyKind::Scad: {
      const double l = p.lambda, a = p.a;
      if ((a - 1.0) * eta <= 1.0) return oracle_fallback(p, t, eta);
      if (t <= l / eta + l) return std::max(t - l / eta, 0.0);
      if (t <= a * l) return ((a - 1.0) * eta * t - a * l) / ((a - 1.0) * eta - 1.0);
      return t;
    }
    case PenaltyKind::Mc: {
      const double l = p.lambda, g = p.gamma;
      if (g * eta <= 1.0) return oracle_fallback(p, t, eta);
      if (t <= l / eta) return 0.0;
      if (t <= g * l) return (t - l / eta) / (1.0 - 1.0 / (g * eta));
      return t;
    }
  }
  throw SpecError("penalty: unknown kind");
}

}  // namespace

double prox_scalar(const PenaltySpec& p, double t, double eta) {
  if (!(eta > 0.0)) throw SpecError("prox: eta must be positive");
  p.validate();
  if (t == 0.0) return 0.0;
  const double s = t > 0.0 ? 1.0 : -1.0;
  return s * prox_abs(p, std::fabs(t), eta);
}

Vec prox_vector(const PenaltySpec& p, const Vec& t, double eta) {
  if (!(eta > 0.0)) throw SpecError("prox: eta must be positive");
  p.validate();
  Vec out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double ti = t[i];
    if (ti == 0.0) {
      out[i] = 0.0;
    } else {
      const double s = ti > 0.0 ? 1.0 : -1.0;
      out[i] = s * prox_abs(p, std::fabs(ti), eta);
    }
  }
  return out;
}

double prox_oracle(const PenaltySpec& p, double t, double eta, double half_width,
                   int coarse_points) {
  if (!(eta > 0.0)) throw SpecError("prox_oracle: eta must be positive");
  if (coarse_points < 1000) throw SpecError("prox_oracle: coarse_points must be >= 1000");
  p.validate();

  auto f = [&](double x) { return penalty_scalar(p, x) + 0.5 * eta * (x - t) * (x - t); };

  double best_x = 0.0;
  double best_f = f(0.0);  // 0 and t are always candidates (jump branches)
  if (f(t) < best_f) {
    best_f = f(t);
    best_x = t;
  }
  const double hw = std::max(half_width, 1e-12);
  double step = 2.0 * hw / coarse_points;
  for (int i = 0; i <= coarse_points; ++i) {
    const double x = -hw + i * step;
    const double fx = f(x);
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  for (int round = 0; round < 3; ++round) {
    const double lo = best_x - step;
    const double fine = step / 10.0;
    for (int i = 0; i <= 20; ++i) {
      const double x = lo + i * fine;
      const double fx = f(x);
      if (fx < best_f) {
        best_f = fx;
        best_x = x;
      }
    }
    step = fine;
  }
  return best_x;
}

double prox_jump_threshold(const PenaltySpec& p, double eta) {
  switch (p.kind) {
    case PenaltyKind::Hard:
      return std::sqrt(2.0 / eta);
    case PenaltyKind::Lq:
      return lq_tau(p.q, eta);
    case PenaltyKind::Mc:
      // Continuous when gamma*eta > 1; the oracle fallback region can jump.
      return p.gamma * eta > 1.0 ? -1.0 : p.lambda / eta;
    case PenaltyKind::Scad:
      return (p.a - 1.0) * eta > 1.0 ? -1.0 : p.lambda / eta;
    case PenaltyKind::Soft:
      return -1.0;
  }
  return -1.0;
}

}  // namespace rcs
