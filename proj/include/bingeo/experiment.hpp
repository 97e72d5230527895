#pragma once

#include "bingeo/device.hpp"
#include "bingeo/evolve.hpp"
#include "bingeo/metrics.hpp"
#include "bingeo/table.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bingeo {

enum class Experiment {
  fields,
  gates_effective,
  gates_full,
  systematic,
  awgn_samples,
  awgn_sweep,
  decoherence,
  phases,
  all
};

// Accepts both the semantic names (fields, gates-effective, ...) and the
// short figure ids (fig2, fig3a, fig3b, fig4, fig5a, fig5b, fig6).
Experiment experiment_from_string(const std::string& name);
std::string experiment_name(Experiment e);

struct ExperimentConfig {
  Experiment experiment = Experiment::fields;
  SystemParams params = SystemParams::paper_defaults();
  GateName gate = GateName::not_gate;
  double theta = 0.0;    // resolved from gate; custom gates set it directly
  double theta_g = 0.0;
  double chi0 = 1.0;
  uint64_t seed = 1234;

  double snr_db = 10.0;
  double snr_min = 5.0, snr_max = 20.0;
  int snr_points = 16;
  int seeds_per_point = 50;

  double epsilon_min = -0.2, epsilon_max = 0.2;
  int epsilon_points = 81;

  // Linear rates in 1/s unless rates_angular is set, then each is
  // multiplied by 2*pi before entering the master equation.
  double rate_max_d = 50e3;
  double rate_max_s = 50e3;
  double rate_max_kappa = 10e3;
  int rate_points = 11;
  bool rates_angular = false;

  std::string model;  // "", "effective" or "full" (per-experiment default)
  int steps_full = 20000;
  int steps_effective = 4000;
  int steps_density = 20000;
  int checkpoints = 200;
  int fock_cutoff = 0;  // 0 = default (20 pure state, 12 density matrix)
  bool fast = false;
  bool force = false;
  bool emit_plots = true;
  bool skip_convergence = false;  // for tests that exercise the harness only
  std::string output_dir = "out";

  void resolve_gate();     // fills theta/theta_g from the named gate
  void apply_fast_tier();  // shrinks sweeps for CI

  static ExperimentConfig from_file(const std::string& file);
};

struct SimResult {
  int exit_code = 0;  // 0 ok, 2 regime, 3 convergence, 4 I/O
  std::string message;
  std::vector<std::string> files;
  std::string manifest_path;
};

SimResult run_experiment(const ExperimentConfig& cfg);

// ----------------------------------------------------------------------
// Building blocks, also used by the test suites.
// ----------------------------------------------------------------------

struct GateRun {
  FidelityTrace trace;
  double final_fidelity = 0.0;
};

// Context shared by one gate simulation at one cutoff.
struct RunContext {
  SystemParams params;
  GateSpec gate;
  GeometricPath path;
  DisplacedBasis basis;
  DriveSpec spec;
};

RunContext make_run_context(const SystemParams& p, const GateSpec& gate,
                            double chi0);

// Effective three-level simulation of one gate. A non-null omega0 overrides
// the clean path envelope (noise studies); scale multiplies the drive.
// Sampled (zero-order-hold) envelopes should be propagated with magnus2 on
// an aligned grid: it reads the field only at step midpoints, which makes
// the step exact for piecewise-constant drives.
GateRun run_effective_gate(const GateSpec& gate, const GeometricPath& path,
                           const std::function<Complex(double)>& omega0,
                           double scale, int steps, int checkpoints,
                           Scheme scheme = Scheme::rk4_fixed);

// Full-model simulation of one gate with the frame correction applied at
// every checkpoint.
GateRun run_full_gate(const RunContext& ctx, int steps, int checkpoints,
                      Scheme scheme = Scheme::magnus4);

// Master-equation run of the NOT gate from |O,g> toward |1,g>; returns
// F_g(T) = <1,g| rho(T) |1,g>.
double run_decoherence_point(const RunContext& ctx,
                             const DecoherenceRates& rates, int steps,
                             Scheme scheme = Scheme::magnus4);

// Convergence probe: final fidelity drift under cutoff+5 and under step
// halving for the given closed-system gate run.
struct ConvergenceReport {
  double cutoff_delta = 0.0;
  double step_delta = 0.0;
  bool ok(double tol = 1e-4) const {
    return cutoff_delta < tol && step_delta < tol;
  }
};

}  // namespace bingeo
