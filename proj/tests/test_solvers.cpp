#include <doctest.h>

#include <cmath>
#include <functional>

#include "rcs/bench.hpp"
#include "rcs/solvers.hpp"

using namespace rcs;

namespace {

// 2-D grid-search global minimizer: coarse 601x601 over [-3,3]^2, then three
// rounds of 10x local refinement. Independent of every solver code path.
Vec grid_min_2d(const std::function<double(double, double)>& f) {
  double bx = 0.0, by = 0.0, bf = f(0.0, 0.0);
  double lo_x = -3.0, lo_y = -3.0, step = 6.0 / 600.0;
  for (int i = 0; i <= 600; ++i) {
    for (int j = 0; j <= 600; ++j) {
      const double x = lo_x + i * step, y = lo_y + j * step;
      const double v = f(x, y);
      if (v < bf) {
        bf = v;
        bx = x;
        by = y;
      }
    }
  }
  for (int round = 0; round < 3; ++round) {
    const double fine = step / 10.0;
    const double ax = bx - step, ay = by - step;
    for (int i = 0; i <= 20; ++i) {
      for (int j = 0; j <= 20; ++j) {
        const double x = ax + i * fine, y = ay + j * fine;
        const double v = f(x, y);
        if (v < bf) {
          bf = v;
          bx = x;
          by = y;
        }
      }
    }
    step = fine;
  }
  return {bx, by};
}

Instance small_instance(int n, int m, int K, const NoiseSpec& noise, std::uint64_t seed) {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::SparsitySweep;
  spec.n = n;
  spec.m = m;
  spec.k_grid = {K};
  spec.noise = noise;
  spec.methods = {parse_method("yall1")};
  spec.mu_grid = {1.0};
  spec.master_seed = seed;
  return make_sweep_instance(spec, K, 0);
}

}  // namespace

TEST_CASE("rho lower bound") {
  CHECK(rho_lower_bound(1.0, 1e-3, 1e-3) == doctest::Approx(4000.0).epsilon(1e-12));
  CHECK(rho_lower_bound(2.0, 1e-3, 1e-3) == doctest::Approx(2000.0).epsilon(1e-12));
  CHECK(rho_lower_bound(1.0, 1e-2, 1e-2) == doctest::Approx(400.0).epsilon(1e-12));
  CHECK_THROWS_AS(rho_lower_bound(1.0, 0.0, 1e-3), SpecError);
}

TEST_CASE("descent constants") {
  SUBCASE("c0 plug-in") {
    SolverConfig cfg;
    cfg.tau1 = 0.5;
    cfg.rho_target = 10.0;
    const auto d = descent_constants(cfg, 1.0);
    CHECK(d.c0 == doctest::Approx(5.0));
  }

  SUBCASE("c1 and c3 at the paper defaults") {
    SolverConfig cfg;
    cfg.mu = 1.0;
    cfg.epsilon = 1e-3;
    cfg.tau2 = 1e-3;
    cfg.rho_target = 4000.0;
    const auto d = descent_constants(cfg, 1.0);
    CHECK(d.c1 == doctest::Approx(1.0 / 1e-3 + 2000.0 - 500.0));
    CHECK(d.rho_min == doctest::Approx(4000.0));
    // c3 vanishes exactly at rho = rho_min and turns positive above it
    CHECK(std::fabs(d.c3) < 1e-7);
    cfg.rho_target = 4000.0 * 1.05;
    CHECK(descent_constants(cfg, 1.0).c3 > 0.0);
    cfg.rho_target = 4000.0 * 0.95;
    CHECK(descent_constants(cfg, 1.0).c3 < 0.0);
  }
}

TEST_CASE("smoothed l1") {
  CHECK(smoothed_l1({3.0, -4.0}, 0.0) == doctest::Approx(7.0));
  CHECK(smoothed_l1({0.0, 0.0}, 1e-3) == doctest::Approx(2e-3));
  CHECK(smoothed_l1({1.0}, 1.0) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("augmented lagrangian") {
  const auto A = LinearMap::dense(3, 3, {1.0, 0.2, 0.0, 0.0, 0.9, 0.1, 0.3, 0.0, 1.1});
  const Vec y{0.4, -0.2, 0.7};
  const auto p = PenaltySpec::lq(0.5);
  SolverConfig cfg;
  cfg.mu = 0.7;
  cfg.epsilon = 1e-2;

  SUBCASE("coupling and quadratic terms vanish when v = Ax - y, w = 0") {
    const Vec x{0.5, -1.0, 0.2};
    Vec v = A.apply(x);
    for (int i = 0; i < 3; ++i) v[i] -= y[i];
    IterateState st{x, v, Vec(3, 0.0), 123.0, 0};
    const double got = augmented_lagrangian_eps(st, A, y, p, cfg);
    CHECK(got == doctest::Approx(smoothed_l1(v, cfg.epsilon) / cfg.mu + penalty_value(p, x)));
  }

  SUBCASE("all-zero state on zero data") {
    IterateState st{Vec(3, 0.0), Vec(3, 0.0), Vec(3, 0.0), 5.0, 0};
    const double got = augmented_lagrangian_eps(st, A, Vec(3, 0.0), p, cfg);
    CHECK(got == doctest::Approx(3.0 * cfg.epsilon / cfg.mu));
  }

  SUBCASE("term-by-term hand evaluation") {
    const Vec x{0.5, -1.0, 0.2}, v{0.1, 0.0, -0.3}, w{0.2, -0.1, 0.4};
    IterateState st{x, v, w, 7.0, 0};
    const Vec Ax = A.apply(x);
    double coupling = 0.0, quad = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double r = Ax[i] - y[i] - v[i];
      coupling += w[i] * r;
      quad += r * r;
    }
    const double want = smoothed_l1(v, cfg.epsilon) / cfg.mu + penalty_value(p, x) - coupling +
                        3.5 * quad;
    CHECK(augmented_lagrangian_eps(st, A, y, p, cfg) == doctest::Approx(want).epsilon(1e-12));
  }

  SUBCASE("auxiliary function adds the coupling term") {
    const Vec x{0.5, -1.0, 0.2}, v{0.1, 0.0, -0.3}, w{0.2, -0.1, 0.4};
    IterateState st{x, v, w, 7.0, 0};
    const double l_eps = augmented_lagrangian_eps(st, A, y, p, cfg);
    CHECK(auxiliary_function(st, v, A, y, p, cfg) == doctest::Approx(l_eps));
    Vec v_prev = v;
    v_prev[0] -= 1.0;  // ||v - v_prev|| = 1
    const double rho_t = detail::resolved_rho_target(cfg);
    const double si = 1.0 / cfg.epsilon + 1.0 / cfg.tau2;
    const double c2 = 2.0 / (rho_t * cfg.mu * cfg.mu) * si * si;
    CHECK(auxiliary_function(st, v_prev, A, y, p, cfg) == doctest::Approx(l_eps + c2));
  }

  SUBCASE("shape errors") {
    IterateState st{Vec(2, 0.0), Vec(3, 0.0), Vec(3, 0.0), 1.0, 0};
    CHECK_THROWS_AS(augmented_lagrangian_eps(st, A, y, p, cfg), ShapeError);
  }
}

TEST_CASE("identity instance closed form") {
  const auto I4 = LinearMap::identity(4);
  const Vec y{0.8, -0.5, 1.2, 0.3};
  SolverConfig cfg;
  cfg.mu = 0.5;
  cfg.epsilon = 0.0;
  cfg.rho_target = 20.0;
  cfg.tol = 1e-10;
  cfg.max_iter = 20000;

  // per-coordinate objective |x-y|/mu + |x| is minimized at x = y for mu < 1
  const auto r1 = solve_l1la_admm(I4, y, cfg, Vec(4, 0.0));
  CHECK(r1.converged);
  CHECK(dist2(r1.x_hat, y) < 1e-5);

  cfg.v_update = VUpdate::ExactSoft;
  const auto r2 = solve_lqla_admm(I4, y, PenaltySpec::soft(), cfg, Vec(4, 0.0));
  CHECK(dist2(r2.x_hat, y) < 1e-5);
}

TEST_CASE("2d brute force equivalence for all four solvers") {
  const auto A = LinearMap::dense(2, 2, {1.0, 0.4, -0.3, 0.9});
  const Vec y = A.apply({1.2, -0.6});

  SolverConfig cfg;
  cfg.tol = 1e-12;
  cfg.max_iter = 100000;

  SUBCASE("smoothed l1-loss lq solver") {
    cfg.mu = 0.1;
    cfg.epsilon = 1e-3;
    const auto p = PenaltySpec::lq(0.5);
    const Vec star = grid_min_2d([&](double a, double b) {
      const Vec ax = A.apply({a, b});
      double fit = 0.0;
      for (int i = 0; i < 2; ++i) {
        const double r = ax[i] - y[i];
        fit += std::sqrt(r * r + cfg.epsilon * cfg.epsilon);
      }
      return fit / cfg.mu + std::sqrt(std::fabs(a)) + std::sqrt(std::fabs(b));
    });
    const Vec x0{star[0] + 0.1, star[1] + 0.1};
    const auto r = solve_lqla_admm(A, y, p, cfg, x0);
    CHECK(std::fabs(r.x_hat[0] - star[0]) < 1e-3);
    CHECK(std::fabs(r.x_hat[1] - star[1]) < 1e-3);
  }

  SUBCASE("l1-loss l1-penalty baseline") {
    cfg.mu = 0.3;
    const Vec star = grid_min_2d([&](double a, double b) {
      const Vec ax = A.apply({a, b});
      return (std::fabs(ax[0] - y[0]) + std::fabs(ax[1] - y[1])) / cfg.mu + std::fabs(a) +
             std::fabs(b);
    });
    const Vec x0{star[0] + 0.1, star[1] + 0.1};
    const auto r = solve_l1la_admm(A, y, cfg, x0);
    CHECK(std::fabs(r.x_hat[0] - star[0]) < 1e-3);
    CHECK(std::fabs(r.x_hat[1] - star[1]) < 1e-3);
  }

  SUBCASE("l2-loss l1-penalty via fista") {
    cfg.mu = 0.2;
    const Vec star = grid_min_2d([&](double a, double b) {
      const Vec ax = A.apply({a, b});
      const double r0 = ax[0] - y[0], r1 = ax[1] - y[1];
      return (r0 * r0 + r1 * r1) / cfg.mu + std::fabs(a) + std::fabs(b);
    });
    const Vec x0{star[0] + 0.1, star[1] + 0.1};
    const auto r = solve_l1ls_fista(A, y, cfg, x0);
    CHECK(std::fabs(r.x_hat[0] - star[0]) < 1e-3);
    CHECK(std::fabs(r.x_hat[1] - star[1]) < 1e-3);
  }

  SUBCASE("l2-loss lq-penalty splitting solver") {
    cfg.mu = 0.2;
    const auto p = PenaltySpec::lq(0.5);
    const Vec star = grid_min_2d([&](double a, double b) {
      const Vec ax = A.apply({a, b});
      const double r0 = ax[0] - y[0], r1 = ax[1] - y[1];
      return (r0 * r0 + r1 * r1) / cfg.mu + std::sqrt(std::fabs(a)) + std::sqrt(std::fabs(b));
    });
    const Vec x0{star[0] + 0.1, star[1] + 0.1};
    const auto r = solve_lqls_admm(A, y, p, cfg, x0);
    CHECK(std::fabs(r.x_hat[0] - star[0]) < 1e-3);
    CHECK(std::fabs(r.x_hat[1] - star[1]) < 1e-3);
  }
}

TEST_CASE("reduction identity: soft, eps=0, exact-soft v-step equals the baseline") {
  Instance inst = small_instance(64, 32, 6, NoiseSpec::gmm(0.1, 100.0, 30.0), 17);
  SolverConfig cfg;
  cfg.mu = 0.5;
  cfg.epsilon = 0.0;
  cfg.rho_target = 50.0;
  cfg.v_update = VUpdate::ExactSoft;
  cfg.max_iter = 50;
  cfg.tol = 1e-300;  // run the full 50 iterations

  std::vector<Vec> xs_a, xs_b, vs_a, vs_b, ws_a, ws_b;
  auto obs_a = [&](SolvePhase ph, int, const Vec& x, const Vec& v, const Vec& w, double) {
    if (ph == SolvePhase::AfterW) {
      xs_a.push_back(x);
      vs_a.push_back(v);
      ws_a.push_back(w);
    }
  };
  auto obs_b = [&](SolvePhase ph, int, const Vec& x, const Vec& v, const Vec& w, double) {
    if (ph == SolvePhase::AfterW) {
      xs_b.push_back(x);
      vs_b.push_back(v);
      ws_b.push_back(w);
    }
  };
  solve_lqla_admm(inst.A, inst.y, PenaltySpec::soft(), cfg, Vec(64, 0.0), obs_a);
  solve_l1la_admm(inst.A, inst.y, cfg, Vec(64, 0.0), obs_b);
  REQUIRE(xs_a.size() == 50);
  REQUIRE(xs_b.size() == 50);
  for (int k = 0; k < 50; ++k) {
    REQUIRE(dist2(xs_a[k], xs_b[k]) <= 1e-12);
    REQUIRE(dist2(vs_a[k], vs_b[k]) <= 1e-12);
    REQUIRE(dist2(ws_a[k], ws_b[k]) <= 1e-12);
  }
}

TEST_CASE("per-step descent and auxiliary monotonicity") {
  const PenaltySpec penalties[] = {PenaltySpec::hard(), PenaltySpec::soft(), PenaltySpec::lq(0.5),
                                   PenaltySpec::scad(0.1, 3.7), PenaltySpec::mc(0.1, 2.0)};
  for (const auto& p : penalties) {
    for (std::uint64_t seed : {31u, 32u, 33u}) {
      Instance inst = small_instance(64, 32, 5, NoiseSpec::gmm(0.1, 100.0, 30.0), seed);
      SolverConfig cfg;
      cfg.mu = 1.0;
      cfg.epsilon = 1e-3;
      cfg.tau2 = 1e-3;
      cfg.rho_target = rho_lower_bound(cfg.mu, cfg.tau2, cfg.epsilon);
      cfg.rho0 = cfg.rho_target;  // fixed rho
      cfg.continuation_factor = 1.0;
      cfg.tau1 = 0.99 / safe_lambda_max(inst.A);
      cfg.max_iter = 200;
      cfg.tol = 1e-300;

      const auto d = descent_constants(cfg, safe_lambda_max(inst.A));
      REQUIRE(d.c0 > 0.0);
      REQUIRE(d.c1 > 0.0);

      Vec cur_x(64, 0.0);
      Vec cur_v = inst.A.apply(cur_x);
      for (int i = 0; i < 32; ++i) cur_v[i] -= inst.y[i];
      Vec cur_w(32, 0.0);
      Vec x_after;
      int violations = 0;
      auto obs = [&](SolvePhase ph, int k, const Vec& x, const Vec& v, const Vec& w, double rho) {
        auto L = [&](const Vec& xx, const Vec& vv, const Vec& ww) {
          IterateState st{xx, vv, ww, rho, k};
          return augmented_lagrangian_eps(st, inst.A, inst.y, p, cfg);
        };
        if (ph == SolvePhase::AfterX) {
          const double before = L(cur_x, v, w);
          const double after = L(x, v, w);
          double dx2 = 0.0;
          for (int i = 0; i < 64; ++i) dx2 += (x[i] - cur_x[i]) * (x[i] - cur_x[i]);
          if (after > before - d.c0 * dx2 + 1e-9 * std::max(1.0, std::fabs(before))) ++violations;
          x_after = x;
        } else if (ph == SolvePhase::AfterV) {
          const double before = L(x_after, cur_v, w);
          const double after = L(x_after, v, w);
          double dv2 = 0.0;
          for (int i = 0; i < 32; ++i) dv2 += (v[i] - cur_v[i]) * (v[i] - cur_v[i]);
          if (after > before - d.c1 * dv2 + 1e-9 * std::max(1.0, std::fabs(before))) ++violations;
        } else {
          cur_x = x;
          cur_v = v;
          cur_w = w;
        }
      };
      const auto res = solve_lqla_admm(inst.A, inst.y, p, cfg, Vec(64, 0.0), obs);
      CHECK(violations == 0);

      // L-tilde trace nonincreasing from the second recorded entry
      int tilde_violations = 0;
      for (std::size_t k = 2; k < res.trace.size(); ++k) {
        const double prev = res.trace[k - 1].l_tilde, cur = res.trace[k].l_tilde;
        if (cur > prev + 1e-9 * std::max(1.0, std::fabs(prev))) ++tilde_violations;
      }
      CHECK(tilde_violations == 0);
    }
  }
}

TEST_CASE("iterate gap vanishes on converged runs") {
  Instance inst = small_instance(64, 32, 5, NoiseSpec::gmm(0.1, 100.0, 30.0), 55);
  SolverConfig cfg;
  cfg.mu = 0.5;  // keeps the multiplier O(1) so the absolute gap bound applies
  cfg.max_iter = 30000;
  const auto res = solve_lqla_admm(inst.A, inst.y, PenaltySpec::lq(0.5), cfg, Vec(64, 0.0));
  REQUIRE(res.converged);
  const auto& last = res.trace.back();
  CHECK(last.dx + last.dv + last.dw < 10.0 * cfg.tol * (1.0 + nrm2(res.x_hat)));
}

TEST_CASE("stationarity residual") {
  SUBCASE("hand-built fixed point of the smoothed system is exact") {
    // identity A, soft penalty: x* = y - d sign(y), v* = -d sign(y),
    // w* = sign(y) with d = mu eps / sqrt(1 - mu^2)
    const int n = 4;
    const auto I = LinearMap::identity(n);
    const Vec y{0.9, -1.4, 2.0, 0.6};
    SolverConfig cfg;
    cfg.mu = 0.5;
    cfg.epsilon = 1e-3;
    cfg.tau1 = 0.5;
    const double d = cfg.mu * cfg.epsilon / std::sqrt(1.0 - cfg.mu * cfg.mu);
    Vec x(n), v(n), w(n);
    for (int i = 0; i < n; ++i) {
      const double s = y[i] > 0.0 ? 1.0 : -1.0;
      x[i] = y[i] - d * s;
      v[i] = -d * s;
      w[i] = s;
    }
    IterateState st{x, v, w, 10.0, 3};
    const double r = stationarity_residual(st, st, I, y, PenaltySpec::soft(), cfg);
    CHECK(r < 1e-10);
  }

  SUBCASE("converged run ends with a small residual") {
    Instance inst = small_instance(64, 32, 5, NoiseSpec::gmm(0.1, 100.0, 30.0), 77);
    SolverConfig cfg;
    cfg.mu = 0.05;
    cfg.tol = 1e-9;
    cfg.max_iter = 20000;
    const auto res = solve_lqla_admm(inst.A, inst.y, PenaltySpec::lq(0.5), cfg, Vec(64, 0.0));
    REQUIRE(res.converged);
    CHECK(res.stationarity < 1e-4);
  }

  SUBCASE("unsmoothed nonconvex path does not settle") {
    Instance inst = small_instance(64, 32, 5, NoiseSpec::gmm(0.1, 100.0, 30.0), 78);
    SolverConfig cfg;
    cfg.mu = 0.05;
    cfg.epsilon = 0.0;
    cfg.rho_target = 10.0 / cfg.mu;  // far below any convergent weight
    cfg.allow_nonconvergent = true;
    cfg.max_iter = 1000;
    const auto res = solve_lqla_admm(inst.A, inst.y, PenaltySpec::hard(), cfg, Vec(64, 0.0));
    CHECK_FALSE(res.converged);
    CHECK(res.stationarity > 1e-4);
    CHECK(res.trace.back().dx > 10.0 * cfg.tol);
  }
}

TEST_CASE("fista and lqls basics") {
  const auto A = LinearMap::gaussian_orthonormal(32, 64, 4);
  SolverConfig cfg;
  cfg.mu = 0.3;

  SUBCASE("zero data yields the zero solution") {
    const auto rf = solve_l1ls_fista(A, Vec(32, 0.0), cfg, Vec(64, 0.0));
    CHECK(nrm2(rf.x_hat) == doctest::Approx(0.0));
    const auto rq = solve_lqls_admm(A, Vec(32, 0.0), PenaltySpec::lq(0.5), cfg, Vec(64, 0.0));
    CHECK(nrm2(rq.x_hat) < 1e-12);
  }

  SUBCASE("noiseless sparse recovery in the exact regime") {
    Instance inst = small_instance(64, 32, 3, NoiseSpec::none(), 91);
    double best = 1e300;
    for (double mu : log_spaced_grid(1e-6, 1e-2, 9)) {
      SolverConfig c;
      c.mu = mu;
      c.max_iter = 20000;
      c.tol = 1e-10;
      const auto r = solve_l1ls_fista(inst.A, inst.y, c, Vec(64, 0.0));
      best = std::min(best, relative_error(r.x_hat, inst.x_true));
    }
    CHECK(best <= 1e-2);
  }
}

TEST_CASE("validation and divergence paths") {
  const auto A = LinearMap::gaussian_orthonormal(8, 16, 4);
  const Vec y(8, 0.5);
  const Vec x0(16, 0.0);
  SolverConfig cfg;

  SUBCASE("nonconvex penalties demand smoothing or an explicit override") {
    cfg.epsilon = 0.0;
    CHECK_THROWS_AS(solve_lqla_admm(A, y, PenaltySpec::lq(0.5), cfg, x0), SpecError);
    cfg.epsilon = 1e-3;
    cfg.v_update = VUpdate::ExactSoft;
    CHECK_THROWS_AS(solve_lqla_admm(A, y, PenaltySpec::lq(0.5), cfg, x0), SpecError);
    cfg.allow_nonconvergent = true;
    CHECK_NOTHROW(solve_lqla_admm(A, y, PenaltySpec::lq(0.5), cfg, x0));
  }

  SUBCASE("oversized tau1 is rejected") {
    cfg.tau1 = 2.0;  // lambda_max = 1 for orthonormal rows
    CHECK_THROWS_AS(solve_lqla_admm(A, y, PenaltySpec::soft(), cfg, x0), SpecError);
  }

  SUBCASE("config validation") {
    cfg.mu = -1.0;
    CHECK_THROWS_AS(cfg.validate(), SpecError);
    cfg.mu = 1.0;
    cfg.max_iter = 0;
    CHECK_THROWS_AS(cfg.validate(), SpecError);
  }

  SUBCASE("dimension mismatches") {
    CHECK_THROWS_AS(solve_lqla_admm(A, Vec(7, 0.0), PenaltySpec::soft(), cfg, x0), ShapeError);
    CHECK_THROWS_AS(solve_lqla_admm(A, y, PenaltySpec::soft(), cfg, Vec(15, 0.0)), ShapeError);
  }

  SUBCASE("a blow-up raises DivergedError carrying the trace") {
    SolverConfig bad;
    bad.tau1 = 1e8;  // wildly unstable gradient step
    bad.allow_nonconvergent = true;
    bad.max_iter = 500;
    bool threw = false;
    try {
      solve_lqls_admm(A, y, PenaltySpec::lq(0.5), bad, x0);
    } catch (const DivergedError& e) {
      threw = true;
      CHECK(e.result().trace.size() >= 1);
    }
    CHECK(threw);
  }
}
