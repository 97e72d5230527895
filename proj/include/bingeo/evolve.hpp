#pragma once

#include "bingeo/device.hpp"
#include "bingeo/operators.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace bingeo {

// Integration schemes. rk4_fixed and dp54_adaptive sample H(t) directly and
// must resolve its fastest phase. magnus2/magnus4 exponentiate the full
// instantaneous Hamiltonian per step, so static stiffness (the -Delta|f><f|
// ladder and the cavity coupling) is handled exactly and only the drive-tone
// variation (~tens of MHz) limits the step. split_static additionally uses
// the precomputed exponential of the static part and an analytic rotation
// for the g-e drive; it needs the split structure of the model.
enum class Scheme { rk4_fixed, dp54_adaptive, magnus2, magnus4, split_static };

std::string scheme_name(Scheme s);

struct TimeGrid {
  double t0 = 0.0;
  double t1 = 0.0;
  int steps = 4001;
  Scheme scheme = Scheme::rk4_fixed;
  double rel_tol = 1e-10;  // dp54 only
  double abs_tol = 1e-12;  // dp54 only
};

struct HamiltonianModel {
  BasisTag basis;
  double fastest_scale = 0.0;  // largest angular frequency in H(t), rad/s
  std::function<Mat(double)> eval;
  // Optional exact split H(t) = *static_part + f(t) *drive_op + h.c.
  std::shared_ptr<const Mat> static_part;
  std::shared_ptr<const Mat> drive_op;
  std::function<Complex(double)> drive_scalar;

  bool has_split() const { return static_part && drive_op && bool(drive_scalar); }
};

HamiltonianModel model_from_full(const FullModel& fm);
HamiltonianModel model_from_effective(std::function<Complex(double)> omega0);
HamiltonianModel model_from_function(std::function<Mat(double)> eval,
                                     BasisTag basis, double fastest_scale);

struct Trajectory {
  std::vector<double> times;
  std::vector<Mat> frames;     // state columns or density matrices
  double norm_drift = 0.0;     // max column-norm deviation at checkpoints
  double ortho_defect = 0.0;   // max ||C^dag C - C0^dag C0|| at checkpoints
  double trace_drift = 0.0;    // density-matrix runs
  double min_eigenvalue = 0.0; // most negative eigenvalue seen

  const Mat& final_frame() const { return frames.back(); }
};

// Closed-system propagation of one state or several columns.
Trajectory propagate_state(const HamiltonianModel& model, const Vec& psi0,
                           const TimeGrid& grid, int checkpoints = 2);
Trajectory propagate_columns(const HamiltonianModel& model, const Mat& cols0,
                             const TimeGrid& grid, int checkpoints = 2);

struct NoiseSpec {
  double epsilon = 0.0;            // systematic rate error
  std::optional<double> snr_db;    // AWGN level R_N, dB
  uint64_t seed = 0;
};

// Lindblad rates in 1/s. Figure-style "kHz" inputs are taken as linear
// rates; an angular convention (multiply by 2*pi) is selectable at the CLI.
struct DecoherenceRates {
  double gamma_d = 0.0;      // qutrit dephasing (e and f projectors)
  double gamma_s = 0.0;      // qutrit relaxation
  double gamma_kappa = 0.0;  // cavity single-photon loss

  void validate() const;
};

struct CollapseOp {
  Mat op;
  double rate = 0.0;
  std::string label;
};

// Collapse set of the master equation: dephasing projectors sigma_ee and
// sigma_ff at gamma_d, relaxation |g><f| and |e><f| at gamma_s/2 and
// |g><e| at gamma_s, and the cavity annihilation operator at gamma_kappa,
// all embedded in the joint space.
std::vector<CollapseOp> collapse_operators(const SystemParams& p,
                                           const DecoherenceRates& rates);

Trajectory lindblad_propagate(const HamiltonianModel& model,
                              const std::vector<CollapseOp>& collapse,
                              const Mat& rho0, const TimeGrid& grid,
                              int checkpoints = 2);

// Uniformly sampled control quadratures with zero-order hold between
// samples. This is the object AWGN acts on.
struct SampledField {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> x, y;  // Omega_x, Omega_y in rad/s

  Complex omega0(double t) const;
  double mean_square_x() const;
  double mean_square_y() const;
};

SampledField sample_fields(const GeometricPath& path);
// Adds seeded white Gaussian noise per channel with noise power equal to the
// measured mean-square signal power times 10^(-snr_db/10).
SampledField with_awgn(const SampledField& field, double snr_db, uint64_t seed);

// Scales the three synthesized drive tones by (1 + epsilon).
DriveSpec with_systematic_error(const DriveSpec& spec, double epsilon);

// Index-ordered parallel map; results must be written by index so sweeps are
// deterministic for any worker count.
void parallel_for(int n, const std::function<void(int)>& fn,
                  int num_threads = 0);

}  // namespace bingeo
