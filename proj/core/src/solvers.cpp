#include "rcs/solvers.hpp"

#include <cmath>

#include "rcs/errors.hpp"

namespace rcs {

namespace {

double rel_change(double dx, double x_norm) { return dx / std::max(x_norm, 1.0); }

double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

void check_dims(const LinearMap& A, const Vec& y, const Vec& x0) {
  if (static_cast<int>(y.size()) != A.rows()) {
    throw ShapeError("solve: y must have length rows(A)");
  }
  if (static_cast<int>(x0.size()) != A.cols()) {
    throw ShapeError("solve: x0 must have length cols(A)");
  }
}

}  // namespace

void SolverConfig::validate() const {
  if (!(mu > 0.0)) throw SpecError("config: mu must be positive");
  if (!(epsilon >= 0.0)) throw SpecError("config: epsilon must be nonnegative");
  if (!(tau2 > 0.0)) throw SpecError("config: tau2 must be positive");
  if (tau1 && !(*tau1 > 0.0)) throw SpecError("config: tau1 must be positive");
  if (rho_target && !(*rho_target > 0.0)) throw SpecError("config: rho_target must be positive");
  if (rho0 && !(*rho0 > 0.0)) throw SpecError("config: rho0 must be positive");
  if (!(continuation_factor >= 1.0)) throw SpecError("config: continuation factor must be >= 1");
  if (!(tol > 0.0)) throw SpecError("config: tol must be positive");
  if (max_iter < 1) throw SpecError("config: max_iter must be >= 1");
}

double rho_lower_bound(double mu, double tau2, double epsilon) {
  if (!(mu > 0.0 && tau2 > 0.0 && epsilon > 0.0)) {
    throw SpecError("rho_lower_bound: mu, tau2, epsilon must be positive");
  }
  const double disc =
      std::sqrt(36.0 * epsilon * epsilon + 28.0 * tau2 * epsilon + 17.0 * tau2 * tau2);
  return (disc + tau2 - 2.0 * epsilon) / (2.0 * mu * tau2 * epsilon);
}

namespace detail {

double resolved_rho_target(const SolverConfig& cfg) {
  double rho;
  if (cfg.rho_target) {
    rho = *cfg.rho_target;
  } else {
    const double eps_eff = cfg.epsilon > 0.0 ? cfg.epsilon : 1e-3;
    rho = 3.2 / (cfg.mu * eps_eff);
  }
  if (cfg.strict_rho) {
    rho = std::max(rho, rho_lower_bound(cfg.mu, cfg.tau2, cfg.epsilon));
  }
  return rho;
}

double resolved_rho0(const SolverConfig& cfg, double rho_target) {
  const double r0 = cfg.rho0 ? *cfg.rho0 : rho_target / 100.0;
  return std::min(r0, rho_target);
}

double resolved_tau1(const SolverConfig& cfg, double lambda_max_safe) {
  return cfg.tau1 ? *cfg.tau1 : 0.99 / lambda_max_safe;
}

Vec smoothed_l1_grad(const Vec& v, double epsilon) {
  Vec g(v.size());
  if (epsilon > 0.0) {
    const double e2 = epsilon * epsilon;
    for (std::size_t i = 0; i < v.size(); ++i) g[i] = v[i] / std::sqrt(v[i] * v[i] + e2);
  } else {
    for (std::size_t i = 0; i < v.size(); ++i) {
      g[i] = (v[i] > 0.0) ? 1.0 : (v[i] < 0.0 ? -1.0 : 0.0);
    }
  }
  return g;
}

}  // namespace detail

DescentConstants descent_constants(const SolverConfig& cfg, double lambda_max) {
  cfg.validate();
  if (!(lambda_max > 0.0)) throw SpecError("descent_constants: lambda_max must be positive");
  const double rho = detail::resolved_rho_target(cfg);
  const double tau1 = detail::resolved_tau1(cfg, lambda_max);
  const double mu = cfg.mu, t2 = cfg.tau2, eps = cfg.epsilon;

  DescentConstants d;
  d.lambda_max = lambda_max;
  d.c0 = 0.5 * rho * (1.0 / tau1 - lambda_max);
  d.c1 = 1.0 / (mu * t2) + 0.5 * rho - 1.0 / (2.0 * mu * eps);
  const double sum_inv = 1.0 / eps + 1.0 / t2;
  d.c2 = 2.0 / (rho * mu * mu) * sum_inv * sum_inv;
  d.c3 = 0.5 * rho -
         2.0 / (rho * mu * mu) * (2.0 / (t2 * t2) + 2.0 / (t2 * eps) + 1.0 / (eps * eps)) +
         (2.0 * eps - t2) / (2.0 * mu * t2 * eps);
  d.rho_min = (eps > 0.0) ? rho_lower_bound(mu, t2, eps)
                          : std::numeric_limits<double>::infinity();
  return d;
}

double smoothed_l1(const Vec& v, double epsilon) {
  if (!(epsilon >= 0.0)) throw SpecError("smoothed_l1: epsilon must be nonnegative");
  double s = 0.0;
  const double e2 = epsilon * epsilon;
  for (double vi : v) s += std::sqrt(vi * vi + e2);
  return s;
}

double augmented_lagrangian_eps(const IterateState& state, const LinearMap& A, const Vec& y,
                                const PenaltySpec& p, const SolverConfig& cfg) {
  if (static_cast<int>(state.x.size()) != A.cols() ||
      static_cast<int>(state.v.size()) != A.rows() ||
      static_cast<int>(state.w.size()) != A.rows() ||
      static_cast<int>(y.size()) != A.rows()) {
    throw ShapeError("augmented_lagrangian: dimension mismatch");
  }
  const Vec Ax = A.apply(state.x);
  double coupling = 0.0;
  double quad = 0.0;
  for (std::size_t i = 0; i < Ax.size(); ++i) {
    const double r = Ax[i] - y[i] - state.v[i];
    coupling += state.w[i] * r;
    quad += r * r;
  }
  return smoothed_l1(state.v, cfg.epsilon) / cfg.mu + penalty_value(p, state.x) - coupling +
         0.5 * state.rho_k * quad;
}

double auxiliary_function(const IterateState& state, const Vec& v_prev, const LinearMap& A,
                          const Vec& y, const PenaltySpec& p, const SolverConfig& cfg) {
  if (v_prev.size() != state.v.size()) throw ShapeError("auxiliary_function: v_prev size");
  const double l_eps = augmented_lagrangian_eps(state, A, y, p, cfg);
  if (!(cfg.epsilon > 0.0)) return quiet_nan();
  const double rho = detail::resolved_rho_target(cfg);
  const double sum_inv = 1.0 / cfg.epsilon + 1.0 / cfg.tau2;
  const double c2 = 2.0 / (rho * cfg.mu * cfg.mu) * sum_inv * sum_inv;
  double dv2 = 0.0;
  for (std::size_t i = 0; i < state.v.size(); ++i) {
    const double d = state.v[i] - v_prev[i];
    dv2 += d * d;
  }
  return l_eps + c2 * dv2;
}

double stationarity_residual(const IterateState& curr, const IterateState& prev,
                             const LinearMap& A, const Vec& y, const PenaltySpec& p,
                             const SolverConfig& cfg) {
  const int m = A.rows(), n = A.cols();
  if (static_cast<int>(curr.x.size()) != n || static_cast<int>(prev.x.size()) != n ||
      static_cast<int>(curr.v.size()) != m || static_cast<int>(prev.v.size()) != m ||
      static_cast<int>(curr.w.size()) != m || static_cast<int>(prev.w.size()) != m ||
      static_cast<int>(y.size()) != m) {
    throw ShapeError("stationarity_residual: dimension mismatch");
  }
  (void)p;
  const double rho = curr.rho_k;
  const double tau1 = cfg.tau1 ? *cfg.tau1 : 0.99 / safe_lambda_max(A);

  // x-inclusion line, with the proximal certificate standing in for the
  // penalty subgradient at curr.x.
  const Vec Ax_prev = A.apply(prev.x);
  Vec residual_prev(m);
  for (int i = 0; i < m; ++i) {
    residual_prev[i] = Ax_prev[i] - (y[i] + prev.v[i] + prev.w[i] / rho);
  }
  const Vec grad_prev = A.adjoint_apply(residual_prev);
  Vec certificate(n);  // s = -(rho/tau1) (x+ - b)
  for (int i = 0; i < n; ++i) {
    const double b = prev.x[i] - tau1 * grad_prev[i];
    certificate[i] = -(rho / tau1) * (curr.x[i] - b);
  }
  Vec dv(m);
  for (int i = 0; i < m; ++i) dv[i] = curr.v[i] - prev.v[i];
  const Vec At_w = A.adjoint_apply(curr.w);
  const Vec At_dv = A.adjoint_apply(dv);
  double r_x = 0.0;
  for (int i = 0; i < n; ++i) {
    const double ri =
        certificate[i] - At_w[i] + rho * At_dv[i] + (rho / tau1) * (curr.x[i] - prev.x[i]);
    r_x = std::max(r_x, std::fabs(ri));
  }

  const Vec d2 = detail::smoothed_l1_grad(curr.v, cfg.epsilon);
  double r_v = 0.0;
  for (int i = 0; i < m; ++i) {
    const double ri = d2[i] / cfg.mu + curr.w[i] + (curr.v[i] - prev.v[i]) / (cfg.mu * cfg.tau2);
    r_v = std::max(r_v, std::fabs(ri));
  }

  const Vec Ax = A.apply(curr.x);
  double r_p = 0.0;
  for (int i = 0; i < m; ++i) {
    const double ri = (Ax[i] - y[i] - curr.v[i]) - (prev.w[i] - curr.w[i]) / rho;
    r_p = std::max(r_p, std::fabs(ri));
  }
  return std::max({r_x, r_v, r_p});
}

namespace {

struct AdmmValidation {
  double lambda_safe;
  double tau1;
  double rho_target;
  double rho0;
  double c2;  // quiet NaN when epsilon = 0
};

AdmmValidation prepare_admm(const LinearMap& A, const Vec& y, const PenaltySpec& p,
                            const SolverConfig& cfg, const Vec& x0, bool exact_soft_requested) {
  cfg.validate();
  p.validate();
  check_dims(A, y, x0);

  const bool nonconvex = !p.is_convex();
  if (nonconvex && !cfg.allow_nonconvergent) {
    if (exact_soft_requested) {
      throw SpecError(
          "solve: exact-soft v-update with a nonconvex penalty is not convergent; "
          "set allow_nonconvergent to run it anyway");
    }
    if (!(cfg.epsilon > 0.0)) {
      throw SpecError(
          "solve: nonconvex penalty requires epsilon > 0; set allow_nonconvergent to "
          "run the unsmoothed iteration anyway");
    }
  }

  AdmmValidation v;
  v.lambda_safe = safe_lambda_max(A);
  v.tau1 = detail::resolved_tau1(cfg, v.lambda_safe);
  if (!cfg.allow_nonconvergent && v.tau1 * v.lambda_safe >= 1.0 + 1e-12) {
    throw SpecError("solve: tau1 must satisfy tau1 < 1/lambda_max(A^T A)");
  }
  v.rho_target = detail::resolved_rho_target(cfg);
  v.rho0 = detail::resolved_rho0(cfg, v.rho_target);
  if (cfg.epsilon > 0.0) {
    const double sum_inv = 1.0 / cfg.epsilon + 1.0 / cfg.tau2;
    v.c2 = 2.0 / (v.rho_target * cfg.mu * cfg.mu) * sum_inv * sum_inv;
  } else {
    v.c2 = quiet_nan();
  }
  return v;
}

// Shared least-absolute ADMM loop. The x-step is the prox of the penalty at
// level rho/tau1; the v-step is either the linearized smoothed update or the
// exact soft threshold.
SolveResult run_la_admm(const LinearMap& A, const Vec& y, const PenaltySpec& p,
                        const SolverConfig& cfg, const Vec& x0, bool exact_soft,
                        const StepObserver& observer) {
  const AdmmValidation pr = prepare_admm(A, y, p, cfg, x0, exact_soft);
  const int m = A.rows(), n = A.cols();
  const double mu = cfg.mu, eps = cfg.epsilon, tau1 = pr.tau1, tau2 = cfg.tau2;

  Vec x = x0;
  Vec Ax = A.apply(x);
  Vec v(m);
  for (int i = 0; i < m; ++i) v[i] = Ax[i] - y[i];
  Vec w(m, 0.0);
  double rho = pr.rho0;

  SolveResult res;
  res.trace.reserve(cfg.max_iter);
  Vec x_prev, v_prev, w_prev;
  double rho_prev = rho;

  Vec b(n), c(m);
  for (int k = 1; k <= cfg.max_iter; ++k) {
    // x-step
    for (int i = 0; i < m; ++i) c[i] = Ax[i] - (y[i] + v[i] + w[i] / rho);
    const Vec grad = A.adjoint_apply(c);
    for (int i = 0; i < n; ++i) b[i] = x[i] - tau1 * grad[i];
    Vec x_new = prox_vector(p, b, rho / tau1);
    if (observer) observer(SolvePhase::AfterX, k, x_new, v, w, rho);

    // v-step
    Vec Ax_new = A.apply(x_new);
    Vec v_new(m);
    if (exact_soft) {
      const double thr = 1.0 / (mu * rho);
      for (int i = 0; i < m; ++i) {
        const double t = Ax_new[i] - y[i] - w[i] / rho;
        v_new[i] = t > thr ? t - thr : (t < -thr ? t + thr : 0.0);
      }
    } else {
      const Vec d2 = detail::smoothed_l1_grad(v, eps);
      const double scale = tau2 / (rho * mu * tau2 + 1.0);
      for (int i = 0; i < m; ++i) {
        const double ci = Ax_new[i] - y[i] - w[i] / rho;
        v_new[i] = scale * (v[i] / tau2 - d2[i] + rho * mu * ci);
      }
    }
    if (observer) observer(SolvePhase::AfterV, k, x_new, v_new, w, rho);

    // dual step
    Vec w_new(m);
    for (int i = 0; i < m; ++i) w_new[i] = w[i] - rho * (Ax_new[i] - y[i] - v_new[i]);
    if (observer) observer(SolvePhase::AfterW, k, x_new, v_new, w_new, rho);

    const double x_norm = nrm2(x);
    const double v_norm = nrm2(v);
    const double w_norm = nrm2(w);
    const double dx = dist2(x_new, x);
    const double dv = dist2(v_new, v);
    const double dw = dist2(w_new, w);

    TraceRow row;
    row.rho_k = rho;
    row.dx = dx;
    row.dv = dv;
    row.dw = dw;
    {
      double fit = 0.0;
      const double e2 = eps * eps;
      for (int i = 0; i < m; ++i) {
        const double r = Ax_new[i] - y[i];
        fit += std::sqrt(r * r + e2);
      }
      row.objective = fit / mu + penalty_value(p, x_new);
      double coupling = 0.0, quad = 0.0;
      for (int i = 0; i < m; ++i) {
        const double r = Ax_new[i] - y[i] - v_new[i];
        coupling += w_new[i] * r;
        quad += r * r;
      }
      row.l_eps = smoothed_l1(v_new, eps) / mu + penalty_value(p, x_new) - coupling +
                  0.5 * rho * quad;
      row.l_tilde = std::isnan(pr.c2) ? quiet_nan() : row.l_eps + pr.c2 * dv * dv;
    }
    res.trace.push_back(row);
    res.iterations = k;

    if (!std::isfinite(dx + dv + dw) || !all_finite(x_new)) {
      res.x_hat = std::move(x_new);
      throw DivergedError("solve: iterate became non-finite at iteration " + std::to_string(k),
                          std::move(res));
    }

    x_prev = std::move(x);
    v_prev = std::move(v);
    w_prev = std::move(w);
    rho_prev = rho;
    x = std::move(x_new);
    v = std::move(v_new);
    w = std::move(w_new);
    Ax = std::move(Ax_new);

    // The whole triple must settle. Early in the continuation ramp the
    // thresholds are huge and x parks at an exact fixed point (dx = 0) for
    // many iterations while the multiplier is still moving, so an x-only
    // test declares victory long before any recovery happened.
    const bool done = k >= 2 && rel_change(dx, x_norm) < cfg.tol &&
                      rel_change(dv, v_norm) < cfg.tol && rel_change(dw, w_norm) < cfg.tol;
    rho = std::min(rho * cfg.continuation_factor, pr.rho_target);
    if (done) {
      res.converged = true;
      break;
    }
  }

  if (!x_prev.empty()) {
    IterateState curr{x, v, w, rho_prev, res.iterations};
    IterateState prev{x_prev, v_prev, w_prev, rho_prev, res.iterations - 1};
    SolverConfig rcfg = cfg;
    rcfg.tau1 = tau1;
    res.stationarity = stationarity_residual(curr, prev, A, y, p, rcfg);
  }
  res.x_hat = std::move(x);
  return res;
}

}  // namespace

SolveResult solve_lqla_admm(const LinearMap& A, const Vec& y, const PenaltySpec& p,
                            const SolverConfig& cfg, const Vec& x0, const StepObserver& observer) {
  return run_la_admm(A, y, p, cfg, x0, cfg.v_update == VUpdate::ExactSoft, observer);
}

SolveResult solve_l1la_admm(const LinearMap& A, const Vec& y, const SolverConfig& cfg,
                            const Vec& x0, const StepObserver& observer) {
  // Soft penalty with the exact v-step: the convex baseline. epsilon only
  // affects reported trace values, never the iterates, so the auto penalty
  // weight uses the fixed reference scale instead of the smoothing size.
  SolverConfig resolved = cfg;
  if (!resolved.rho_target) resolved.rho_target = 3.2 / (resolved.mu * 1e-3);
  return run_la_admm(A, y, PenaltySpec::soft(), resolved, x0, /*exact_soft=*/true, observer);
}

SolveResult solve_l1ls_fista(const LinearMap& A, const Vec& y, const SolverConfig& cfg,
                             const Vec& x0) {
  cfg.validate();
  check_dims(A, y, x0);
  const int m = A.rows(), n = A.cols();
  const double mu = cfg.mu;
  const double lambda_safe = safe_lambda_max(A);
  const double L = 2.0 * lambda_safe / mu;
  const double step = 1.0 / L;
  const double thr = 1.0 / L;

  Vec x = x0;
  Vec z = x0;
  Vec Ax = A.apply(x);
  Vec Az = Ax;
  double t = 1.0;

  SolveResult res;
  res.trace.reserve(cfg.max_iter);
  Vec r(m), x_new(n);
  for (int k = 1; k <= cfg.max_iter; ++k) {
    for (int i = 0; i < m; ++i) r[i] = Az[i] - y[i];
    const Vec grad = A.adjoint_apply(r);  // times 2/mu below
    for (int i = 0; i < n; ++i) {
      const double g = z[i] - step * (2.0 / mu) * grad[i];
      x_new[i] = g > thr ? g - thr : (g < -thr ? g + thr : 0.0);
    }
    const Vec Ax_new = A.apply(x_new);
    const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_new;

    const double x_norm = nrm2(x);
    const double dx = dist2(x_new, x);

    TraceRow row;
    row.rho_k = quiet_nan();
    row.dx = dx;
    row.dv = quiet_nan();
    row.dw = quiet_nan();
    double fit = 0.0;
    for (int i = 0; i < m; ++i) {
      const double ri = Ax_new[i] - y[i];
      fit += ri * ri;
    }
    row.objective = fit / mu + nrm1(x_new);
    row.l_eps = quiet_nan();
    row.l_tilde = quiet_nan();
    res.trace.push_back(row);
    res.iterations = k;

    if (!all_finite(x_new)) {
      res.x_hat = x_new;
      throw DivergedError("fista: iterate became non-finite at iteration " + std::to_string(k),
                          std::move(res));
    }

    for (int i = 0; i < n; ++i) z[i] = x_new[i] + beta * (x_new[i] - x[i]);
    for (int i = 0; i < m; ++i) Az[i] = Ax_new[i] + beta * (Ax_new[i] - Ax[i]);
    x = x_new;
    Ax = Ax_new;
    t = t_new;

    if (k >= 2 && rel_change(dx, x_norm) < cfg.tol) {
      res.converged = true;
      break;
    }
  }

  // Prox-gradient fixed-point residual at the final point.
  {
    for (int i = 0; i < m; ++i) r[i] = Ax[i] - y[i];
    const Vec grad = A.adjoint_apply(r);
    double sres = 0.0;
    for (int i = 0; i < n; ++i) {
      const double g = x[i] - step * (2.0 / mu) * grad[i];
      const double px = g > thr ? g - thr : (g < -thr ? g + thr : 0.0);
      sres = std::max(sres, std::fabs(x[i] - px));
    }
    res.stationarity = sres * L;
  }
  res.x_hat = std::move(x);
  return res;
}

SolveResult solve_lqls_admm(const LinearMap& A, const Vec& y, const PenaltySpec& p,
                            const SolverConfig& cfg, const Vec& x0) {
  cfg.validate();
  p.validate();
  check_dims(A, y, x0);
  if (p.kind != PenaltyKind::Lq) {
    throw SpecError("solve_lqls_admm: penalty must be lq");
  }
  const int m = A.rows(), n = A.cols();
  const double mu = cfg.mu;
  const double lambda_safe = safe_lambda_max(A);
  const double rho = cfg.rho_target ? *cfg.rho_target : 10.0 / mu;
  // Step for the linearized least-squares x-update; its smooth part has
  // gradient Lipschitz constant 2 lambda_max / mu + rho.
  const double step = cfg.tau1 ? *cfg.tau1 : 0.99 / (2.0 * lambda_safe / mu + rho);

  Vec x = x0;
  Vec z = x0;
  Vec w(n, 0.0);
  Vec Ax = A.apply(x);

  SolveResult res;
  res.trace.reserve(cfg.max_iter);
  Vec t(n), r(m), x_new(n);
  Vec z_new;
  for (int k = 1; k <= cfg.max_iter; ++k) {
    for (int i = 0; i < n; ++i) t[i] = x[i] + w[i] / rho;
    z_new = prox_vector(p, t, rho);

    for (int i = 0; i < m; ++i) r[i] = Ax[i] - y[i];
    const Vec grad_ls = A.adjoint_apply(r);
    for (int i = 0; i < n; ++i) {
      const double g = (2.0 / mu) * grad_ls[i] + rho * (x[i] - z_new[i] + w[i] / rho);
      x_new[i] = x[i] - step * g;
    }

    Vec w_new(n);
    for (int i = 0; i < n; ++i) w_new[i] = w[i] + rho * (x_new[i] - z_new[i]);

    const double x_norm = nrm2(x);
    const double z_norm = nrm2(z);
    const double w_norm = nrm2(w);
    const double dx = dist2(x_new, x);
    const double dz = dist2(z_new, z);
    const double dw = dist2(w_new, w);

    const Vec Ax_new = A.apply(x_new);
    TraceRow row;
    row.rho_k = rho;
    row.dx = dx;
    row.dv = dz;
    row.dw = dw;
    double fit = 0.0;
    for (int i = 0; i < m; ++i) {
      const double ri = Ax_new[i] - y[i];
      fit += ri * ri;
    }
    row.objective = fit / mu + penalty_value(p, x_new);
    row.l_eps = quiet_nan();
    row.l_tilde = quiet_nan();
    res.trace.push_back(row);
    res.iterations = k;

    if (!all_finite(x_new) || !std::isfinite(dx + dz + dw)) {
      res.x_hat = x_new;
      throw DivergedError("lqls: iterate became non-finite at iteration " + std::to_string(k),
                          std::move(res));
    }

    x = x_new;
    z = z_new;
    w = std::move(w_new);
    Ax = Ax_new;

    if (k >= 2 && rel_change(dx, x_norm) < cfg.tol && rel_change(dz, z_norm) < cfg.tol &&
        rel_change(dw, w_norm) < cfg.tol) {
      res.converged = true;
      break;
    }
  }

  double sres = 0.0;
  for (int i = 0; i < n; ++i) sres = std::max(sres, std::fabs(x[i] - z[i]));
  res.stationarity = sres;
  res.x_hat = std::move(x);
  return res;
}

}  // namespace rcs
