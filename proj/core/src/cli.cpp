#include "rcs/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rcs/bench.hpp"
#include "rcs/errors.hpp"
#include "rcs/wavelets.hpp"

namespace rcs {

namespace {

struct CommonOverrides {
  std::string config_path;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int trials = 0;
  bool trials_set = false;
  int threads = 0;
  bool threads_set = false;

  void attach(CLI::App* cmd, bool with_trials = true) {
    cmd->add_option("--config", config_path, "flat key=value config file")->required();
    cmd->add_option("--out", out, "output path (overrides config)");
    cmd->add_option("--seed", seed, "master seed (overrides config)")
        ->each([this](const std::string&) { seed_set = true; });
    if (with_trials) {
      cmd->add_option("--trials", trials, "trial count (overrides config)")
          ->each([this](const std::string&) { trials_set = true; });
    }
    cmd->add_option("--threads", threads, "worker threads (overrides config)")
        ->each([this](const std::string&) { threads_set = true; });
  }

  void apply(ExperimentSpec& spec) const {
    if (!out.empty()) spec.out_path = out;
    if (seed_set) spec.master_seed = seed;
    if (trials_set) spec.trials = trials;
    if (threads_set) spec.threads = threads;
  }
};

int do_sweep(const CommonOverrides& ov) {
  ExperimentSpec spec = sweep_from_config(ConfigFile::parse_file(ov.config_path));
  ov.apply(spec);
  spec.validate();
  const auto rows = run_sparsity_sweep(spec);
  if (spec.out_path.empty()) {
    write_sweep_csv(rows, std::cout);
  } else {
    std::ofstream out(spec.out_path);
    if (!out) throw SpecError("sweep: cannot write '" + spec.out_path + "'");
    write_sweep_csv(rows, out);
    std::cout << "wrote " << rows.size() << " rows to " << spec.out_path << "\n";
  }
  return 0;
}

int do_image(const CommonOverrides& ov) {
  ExperimentSpec spec = image_from_config(ConfigFile::parse_file(ov.config_path));
  ov.apply(spec);
  spec.validate();
  const ImageReport report = run_image_recovery(spec);
  for (const auto& mr : report.methods) {
    std::cout << mr.method << (mr.params.empty() ? "" : "(" + mr.params + ")")
              << ": psnr_db=" << fmt_num(mr.psnr_db) << " rel_err=" << fmt_num(mr.rel_err)
              << " mu=" << fmt_num(mr.mu_selected) << " iters=" << mr.iterations << "\n";
  }
  write_image_report(report, spec);
  if (!spec.out_path.empty()) {
    std::cout << "wrote report to " << spec.out_path << "/report.json\n";
  }
  return 0;
}

int do_recover(const CommonOverrides& ov, const std::string& trace_path) {
  ExperimentSpec spec = recover_from_config(ConfigFile::parse_file(ov.config_path));
  ov.apply(spec);
  spec.validate();
  const int K = spec.k_grid.front();
  Instance inst = make_sweep_instance(spec, K, 0);
  const MethodSpec& method = spec.methods.front();

  bool warm = false;
  if (spec.init == "yall1" || (spec.init == "default" && method.wants_warm_start())) {
    const auto ysel =
        select_mu_oracle(parse_method("yall1"), inst, spec.mu_grid, spec.solver, spec.threads);
    inst.x0 = ysel.best.x_hat;
    warm = true;
  }

  const auto sel = select_mu_oracle(method, inst, spec.mu_grid, spec.solver, spec.threads);
  const bool success = sel.best_rel_err <= kSuccessThreshold;
  std::cout << "method: " << method.label() << "\n"
            << "init: " << (warm ? "yall1" : "zero") << "\n"
            << "mu_selected: " << fmt_num(sel.mu_star) << " (grid of " << spec.mu_grid.size()
            << ")\n"
            << "relative_error: " << fmt_num(sel.best_rel_err) << "\n"
            << "success: " << (success ? "yes" : "no") << "\n"
            << "iterations: " << sel.best.iterations
            << ", converged: " << (sel.best.converged ? "yes" : "no") << "\n"
            << "stationarity: " << fmt_num(sel.best.stationarity) << "\n";
  if (!trace_path.empty()) {
    std::ofstream out(trace_path);
    if (!out) throw SpecError("recover: cannot write '" + trace_path + "'");
    write_trace_csv(sel.best, out);
    std::cout << "wrote trace to " << trace_path << "\n";
  }
  return 0;
}

int do_gen_phantom(int side, const std::string& out) {
  const Image img = phantom_shepp_logan(side);
  write_pgm(img, out);
  std::cout << "wrote " << side << "x" << side << " phantom to " << out << "\n";
  return 0;
}

int do_prox_check(int points, std::uint64_t seed) {
  const auto rows = run_prox_check(points, seed);
  bool ok = true;
  std::printf("%-8s %8s %12s %12s  %s\n", "variant", "points", "violations", "max_err", "status");
  for (const auto& r : rows) {
    const bool pass = r.violations == 0;
    ok = ok && pass;
    std::printf("%-8s %8d %12d %12.3e  %s\n", r.variant.c_str(), r.points, r.violations,
                r.max_err, pass ? "pass" : "FAIL");
  }
  return ok ? 0 : 1;
}

int do_check_config(const std::string& config_path) {
  const ConfigFile cfg = ConfigFile::parse_file(config_path);
  cfg.require_known_keys({"n", "m", "matrix", "seed", "mu", "epsilon", "tau1", "tau2",
                          "rho_target", "rho0", "continuation", "tol", "max_iter", "v_update",
                          "init", "allow_nonconvergent", "strict_rho"});
  SolverConfig s;
  s.mu = cfg.get_double("mu", 1.0);
  s.epsilon = cfg.get_double("epsilon", 1e-3);
  s.tau1 = cfg.get_auto_double("tau1");
  s.tau2 = cfg.get_double("tau2", 1e-3);
  s.rho_target = cfg.get_auto_double("rho_target");
  s.rho0 = cfg.get_auto_double("rho0");
  s.continuation_factor = cfg.get_double("continuation", 1.02);
  s.tol = cfg.get_double("tol", 1e-7);
  s.max_iter = cfg.get_int("max_iter", 1000);
  s.strict_rho = cfg.get_bool("strict_rho", false);
  s.validate();

  const int n = cfg.get_int("n", 512);
  const int m = cfg.get_int("m", 200);
  const std::string matrix = cfg.get_string("matrix", "gaussian");
  const std::uint64_t seed = cfg.get_u64("seed", 0);
  const LinearMap A = (matrix == "partial-dct") ? LinearMap::partial_dct(n, m, seed)
                                                : LinearMap::gaussian_orthonormal(m, n, seed);

  const EigEstimate est = max_eig_gram(A, 1e-10, 2000, seed);
  const double lambda_safe = kEigSafety * est.value;
  const DescentConstants d = descent_constants(s, lambda_safe);
  const double rho_t = detail::resolved_rho_target(s);
  const double tau1 = detail::resolved_tau1(s, lambda_safe);

  std::cout << "matrix: " << matrix << " " << m << "x" << n << "\n"
            << "lambda_max estimate: " << fmt_num(est.value) << " ("
            << (est.converged ? "converged" : "NOT converged") << " in " << est.iterations
            << " iterations; safety-factored: " << fmt_num(lambda_safe) << ")\n"
            << "mu: " << fmt_num(s.mu) << "  epsilon: " << fmt_num(s.epsilon)
            << "  tau2: " << fmt_num(s.tau2) << "\n"
            << "tau1: " << fmt_num(tau1) << "\n"
            << "rho_target: " << fmt_num(rho_t) << "\n"
            << "rho_min: " << fmt_num(d.rho_min) << "\n"
            << "c0: " << fmt_num(d.c0) << "  c1: " << fmt_num(d.c1) << "  c2: " << fmt_num(d.c2)
            << "  c3: " << fmt_num(d.c3) << "\n";
  if (rho_t >= d.rho_min) {
    std::cout << "sufficient condition (rho_target >= rho_min): met\n";
  } else {
    std::cout << "sufficient condition (rho_target >= rho_min): NOT met (experimental default)\n";
  }
  std::cout << "step condition (tau1 < 1/lambda_max): "
            << (tau1 * lambda_safe < 1.0 ? "ok" : "VIOLATED") << "\n";
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"robust sparse recovery toolkit"};
  app.require_subcommand(1);

  CommonOverrides sweep_ov, image_ov, recover_ov;
  std::string trace_path;
  int phantom_side = 256;
  std::string phantom_out = "phantom.pgm";
  int prox_points = 200;
  std::uint64_t prox_seed = 0;
  std::string check_config_path;

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sparsity sweep; emits CSV");
  sweep_ov.attach(sweep);

  auto* image = app.add_subcommand("image", "image recovery experiment; emits JSON + PGMs");
  image_ov.attach(image);

  auto* recover = app.add_subcommand("recover", "single seeded recovery instance");
  recover_ov.attach(recover, /*with_trials=*/false);
  recover->add_option("--trace", trace_path, "write per-iteration trace CSV here");

  auto* phantom = app.add_subcommand("gen-phantom", "rasterize the head phantom to a PGM");
  phantom->add_option("--side", phantom_side, "image side (power of two, >= 16)");
  phantom->add_option("--out", phantom_out, "output PGM path")->required();

  auto* prox = app.add_subcommand("prox-check", "closed-form prox vs brute-force oracle");
  prox->add_option("--points", prox_points, "points per variant");
  prox->add_option("--seed", prox_seed, "rng seed");

  auto* check = app.add_subcommand("check-config", "descent constants and convergence conditions");
  check->add_option("--config", check_config_path, "flat key=value config file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (sweep->parsed()) return do_sweep(sweep_ov);
    if (image->parsed()) return do_image(image_ov);
    if (recover->parsed()) return do_recover(recover_ov, trace_path);
    if (phantom->parsed()) return do_gen_phantom(phantom_side, phantom_out);
    if (prox->parsed()) return do_prox_check(prox_points, prox_seed);
    if (check->parsed()) return do_check_config(check_config_path);
  } catch (const DivergedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const OracleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace rcs
