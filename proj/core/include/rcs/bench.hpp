#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rcs/config.hpp"
#include "rcs/linop.hpp"
#include "rcs/signals.hpp"
#include "rcs/solvers.hpp"

namespace rcs {

enum class ExperimentKind { SparsitySweep, ImageRecovery, SingleRecover, ProxCheck, ConfigCheck };

// One reconstruction method: solver name plus its penalty, as written in
// config method tokens like "lqla-admm(q=0.2)" or "lqla-admm(penalty=scad;
// lambda=0.1;a=3.7)".
struct MethodSpec {
  std::string name;  // l1ls-fista | lqls-admm | yall1 | lqla-admm
  PenaltySpec penalty = PenaltySpec::lq(0.5);
  std::string params;  // canonical parameter string for reports, may be empty

  bool wants_warm_start() const;  // nonconvex methods start from the yall1 solution
  std::string label() const { return params.empty() ? name : name + "(" + params + ")"; }
};

MethodSpec parse_method(const std::string& token);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::SparsitySweep;
  int n = 512;
  int m = 200;
  std::vector<int> k_grid;
  std::string matrix = "gaussian";  // gaussian | partial-dct
  NoiseSpec noise = NoiseSpec::gaussian(30.0);
  std::vector<MethodSpec> methods;
  std::vector<double> mu_grid;  // defaults to 15 log-spaced points in [1e-4, 1e2]
  int trials = 1;
  std::uint64_t master_seed = 0;
  int threads = 1;
  std::string out_path;
  std::string image = "shepp-logan";  // builtin phantom or a PGM path
  int side = 256;                     // phantom side when image is builtin
  double sampling = 0.4;              // image measurements: m = round(sampling * n)
  std::string init = "default";       // default | yall1 | zero
  SolverConfig solver;

  void validate() const;
};

std::vector<double> default_mu_grid();

ExperimentSpec sweep_from_config(const ConfigFile& cfg);
ExperimentSpec image_from_config(const ConfigFile& cfg);
ExperimentSpec recover_from_config(const ConfigFile& cfg);

// A fully materialized reconstruction problem.
struct Instance {
  LinearMap A;
  Vec y;
  Vec x_true;
  Vec x0;  // warm start for nonconvex methods; empty = cold start at zero
};

Instance make_sweep_instance(const ExperimentSpec& spec, int K, int trial);

struct MuRunStat {
  double mu = 0.0;
  double rel_err = 0.0;
  int iterations = 0;
  bool converged = false;
  bool failed = false;
  double runtime_ms = 0.0;
  std::string diagnostic;
};

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleSelection {
  double mu_star = 0.0;
  int index = -1;
  double best_rel_err = 0.0;
  SolveResult best;
  std::vector<MuRunStat> per_mu;
};

// Runs `method` at every grid value against the same instance and returns
// the entry with the smallest relative error; ties break toward larger mu.
// Throws OracleError (listing per-mu outcomes) when every run diverged.
OracleSelection select_mu_oracle(const MethodSpec& method, const Instance& inst,
                                 const std::vector<double>& mu_grid, const SolverConfig& base,
                                 int threads = 1);

SolveResult run_method(const MethodSpec& method, const Instance& inst, const SolverConfig& base,
                       double mu);

struct SweepRow {
  int K = 0;
  std::string method;
  std::string params;
  double success_rate = 0.0;
  double mean_rel_err = 0.0;
  double mean_iters = 0.0;
  double mean_runtime_ms = 0.0;
  double mu_selected = 0.0;
};

std::vector<SweepRow> run_sparsity_sweep(const ExperimentSpec& spec);

inline constexpr const char* kSweepCsvHeader =
    "K,method,params,success_rate,mean_rel_err,mean_iters,mean_runtime_ms,mu_selected";

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

struct ImageMethodReport {
  std::string method;
  std::string params;
  double psnr_db = 0.0;
  double rel_err = 0.0;
  double mu_selected = 0.0;
  int iterations = 0;
  bool converged = false;
  double runtime_ms = 0.0;
  Vec coefficients;  // recovered wavelet coefficients
};

struct ImageReport {
  int side = 0;
  int n = 0;
  int m = 0;
  std::string noise;
  std::string image;
  double measured_snr_db = 0.0;
  std::vector<ImageMethodReport> methods;
};

ImageReport run_image_recovery(const ExperimentSpec& spec);

// Serializes the report (minus coefficient vectors) and writes one PGM per
// method into out_path when it is nonempty.
void write_image_report(const ImageReport& report, const ExperimentSpec& spec);

// Closed-form prox vs brute-force oracle over random (t, eta) draws with
// randomized penalty parameters; disagreements away from jump thresholds
// count as violations.
struct ProxCheckRow {
  std::string variant;
  int points = 0;
  int violations = 0;
  double max_err = 0.0;  // over non-exempt points
};

std::vector<ProxCheckRow> run_prox_check(int points_per_variant, std::uint64_t seed);

inline constexpr const char* kTraceCsvHeader = "k,objective,L_eps,L_tilde,dx,dv,dw,rho_k";

void write_trace_csv(const SolveResult& result, std::ostream& out);

// Deterministic %.12g formatting used by all emitted tables.
std::string fmt_num(double v);

void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace rcs
