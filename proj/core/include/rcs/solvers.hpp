#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>

#include "rcs/linop.hpp"
#include "rcs/prox.hpp"
#include "rcs/vec.hpp"

namespace rcs {

enum class VUpdate { Linearized, ExactSoft };

// All scalar knobs of the reconstruction algorithms. Optional fields resolve
// against the operator at solve time:
//   tau1       -> 0.99 / (safety-factored lambda_max estimate)
//   rho_target -> 3.2 / (mu * epsilon)   (reference scale 1e-3 when epsilon=0;
//                 the lq least-squares solver uses 10 / mu instead)
//   rho0       -> rho_target / 100
// strict_rho raises rho_target to the convergence lower bound, which the
// experimental default deliberately undershoots.
struct SolverConfig {
  double mu = 1.0;
  double epsilon = 1e-3;
  std::optional<double> tau1;
  double tau2 = 1e-3;
  std::optional<double> rho_target;
  std::optional<double> rho0;
  double continuation_factor = 1.02;
  double tol = 1e-7;
  int max_iter = 1000;
  VUpdate v_update = VUpdate::Linearized;
  bool allow_nonconvergent = false;
  bool strict_rho = false;

  void validate() const;
};

// ADMM triple plus the penalty weight that produced it.
struct IterateState {
  Vec x;
  Vec v;
  Vec w;
  double rho_k = 0.0;
  int k = 0;
};

struct TraceRow {
  double objective = 0.0;  // smoothed data-fit objective at the new x
  double l_eps = 0.0;      // augmented Lagrangian at the new triple
  double l_tilde = 0.0;    // l_eps + c2 ||v - v_prev||^2 (NaN when epsilon = 0)
  double dx = 0.0;
  double dv = 0.0;
  double dw = 0.0;
  double rho_k = 0.0;
};

struct SolveResult {
  Vec x_hat;
  int iterations = 0;
  bool converged = false;
  std::vector<TraceRow> trace;
  double stationarity = std::numeric_limits<double>::quiet_NaN();
};

// Raised when an iterate stops being finite; carries everything produced up
// to that point so callers can log the blow-up.
class DivergedError : public std::runtime_error {
 public:
  DivergedError(const std::string& what, SolveResult partial)
      : std::runtime_error(what), result_(std::make_shared<SolveResult>(std::move(partial))) {}
  const SolveResult& result() const { return *result_; }

 private:
  std::shared_ptr<SolveResult> result_;
};

struct DescentConstants {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double rho_min = 0.0;
  double lambda_max = 0.0;
};

// Penalty-weight threshold above which the smoothed iteration is provably
// convergent: (sqrt(36 e^2 + 28 t2 e + 17 t2^2) + t2 - 2e) / (2 mu t2 e).
double rho_lower_bound(double mu, double tau2, double epsilon);

// Descent constants of the per-step decrease estimates, evaluated at the
// resolved rho_target. lambda_max is the caller's (safety-factored) estimate.
DescentConstants descent_constants(const SolverConfig& cfg, double lambda_max);

// sum_i sqrt(v_i^2 + epsilon^2)
double smoothed_l1(const Vec& v, double epsilon);

// (1/mu)||v||_{1,eps} + P(x) - <w, Ax - y - v> + (rho_k/2)||Ax - y - v||^2
double augmented_lagrangian_eps(const IterateState& state, const LinearMap& A, const Vec& y,
                                const PenaltySpec& p, const SolverConfig& cfg);

// Augmented Lagrangian plus the coupling term c2 ||v - v_prev||^2.
double auxiliary_function(const IterateState& state, const Vec& v_prev, const LinearMap& A,
                          const Vec& y, const PenaltySpec& p, const SolverConfig& cfg);

// Max-norm residual of the first-order system linking two consecutive
// iterates; vanishes at a fixed point of the smoothed iteration.
double stationarity_residual(const IterateState& curr, const IterateState& prev,
                             const LinearMap& A, const Vec& y, const PenaltySpec& p,
                             const SolverConfig& cfg);

enum class SolvePhase { AfterX, AfterV, AfterW };

// Test/diagnostic hook called inside the iteration, after each sub-step,
// with the in-progress triple and the rho in effect this iteration.
using StepObserver =
    std::function<void(SolvePhase, int k, const Vec& x, const Vec& v, const Vec& w, double rho)>;

// Least-absolute loss with a generalized sparsity penalty, solved by
// linearized ADMM on the smoothed formulation. The main algorithm.
SolveResult solve_lqla_admm(const LinearMap& A, const Vec& y, const PenaltySpec& p,
                            const SolverConfig& cfg, const Vec& x0,
                            const StepObserver& observer = {});

// l1-loss / l1-penalty baseline (exact soft v-step); converges to the global
// minimizer of its convex formulation.
SolveResult solve_l1la_admm(const LinearMap& A, const Vec& y, const SolverConfig& cfg,
                            const Vec& x0, const StepObserver& observer = {});

// Accelerated proximal gradient on the l2-loss / l1-penalty formulation.
SolveResult solve_l1ls_fista(const LinearMap& A, const Vec& y, const SolverConfig& cfg,
                             const Vec& x0);

// l2-loss with lq penalty via x = z splitting; linearized least-squares step.
SolveResult solve_lqls_admm(const LinearMap& A, const Vec& y, const PenaltySpec& p,
                            const SolverConfig& cfg, const Vec& x0);

namespace detail {
double resolved_rho_target(const SolverConfig& cfg);
double resolved_rho0(const SolverConfig& cfg, double rho_target);
double resolved_tau1(const SolverConfig& cfg, double lambda_max_safe);
Vec smoothed_l1_grad(const Vec& v, double epsilon);
}  // namespace detail

}  // namespace rcs
