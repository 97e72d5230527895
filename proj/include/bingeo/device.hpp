#pragma once

#include "bingeo/operators.hpp"
#include "bingeo/path.hpp"

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace bingeo {

// Physical constants of the cavity-qutrit device. All frequencies are
// angular (rad/s); the plain-text loader takes linear Hz and multiplies
// by 2*pi.
struct SystemParams {
  double lambda = 0.0;  // e-f <-> cavity coupling
  double Delta = 0.0;   // e-f drive detuning
  double delta = 0.0;   // cavity term in the rotated frame
  double alpha0 = 0.0;  // displacement of the intermediate state
  double T = 0.0;       // gate time, s
  int n_max = 20;       // Fock cutoff

  // Documentation-only; echoed in reports, never used in dynamics.
  double omega0 = 0.0;    // bare cavity frequency
  double omega_ge = 0.0;  // qutrit g-e transition
  double omega_ef = 0.0;  // qutrit e-f transition

  void validate() const;
  static SystemParams paper_defaults();
};

// Derived drive tones. The three g-e Rabi envelopes share the path envelope:
// Omega_tilde_{2k}(t) = scale * tilde_ratio[k] * omega0_envelope(t).
struct DriveSpec {
  double Omega = 0.0;        // e-f drive amplitude, rad/s (real)
  double omega_tilde = 0.0;  // delta + lambda^2/Delta
  std::array<double, 3> Delta_p{};      // tone detunings, k = 0,1,2
  std::array<double, 3> bright_coeff{}; // target Fock amplitudes c_{2k}
  std::array<double, 3> beta{};         // beta_{2k,0} of the displaced basis
  std::array<double, 3> tilde_ratio{};  // c_{2k} / beta_{2k,0}
  double scale = 1.0;                   // (1 + epsilon) systematic factor
  std::function<Complex(double)> omega0_envelope;

  Complex omega_tilde_2k(int k, double t) const {
    return scale * tilde_ratio[k] * omega0_envelope(t);
  }
  // Total g-e coupling scalar sum_k Omega_tilde_{2k}(t) e^{-i Delta'_{2k} t}.
  Complex ge_drive(double t) const;
};

DriveSpec derive_drive_spec(const SystemParams& p, const GateSpec& gate,
                            const GeometricPath& path,
                            const DisplacedBasis& basis);

// Full Hamiltonian of the driven system in the joint basis. The static part
// (e-f drive + cavity coupling + detunings) is precomputed; only the g-e
// drive scalar varies in time.
struct FullModel {
  SystemParams params;
  DriveSpec spec;
  std::shared_ptr<const Mat> h_static;  // H1 + Hdelta + HDelta
  std::shared_ptr<const Mat> ge_op;     // |g><e| (x) I

  Mat hamiltonian(double t) const;
};

FullModel make_full_model(const SystemParams& p, const DriveSpec& spec);
ComplexOperator full_hamiltonian(const SystemParams& p, const DriveSpec& spec,
                                 double t);

// Effective three-level Hamiltonian on {|+,g>, |-,g>, |0~,e>}:
// Omega_0(t) |+,g><0~,e| + h.c.; the |-,g> row and column stay zero.
ComplexOperator effective_hamiltonian(const GeometricPath& path, double t);
ComplexOperator effective_hamiltonian(const std::function<Complex(double)>& omega0,
                                      double t);

// Frame map from the lab frame of the full model to the rotating frame the
// effective dynamics lives in: diag phases exp(+i delta n t) on the g branch
// and exp(+i (omega_tilde A^dag A + Omega^2/Delta - omega_tilde alpha0^2) t)
// on the e branch. Identity at t = 0 and, for commensurate delta*T, on the
// g branch at t = T.
Mat frame_correction(const SystemParams& p, const DriveSpec& spec,
                     const DisplacedBasis& basis, double t);

// Embedding of the effective basis states into the joint space.
struct EffectiveEmbedding {
  Vec plus_g;        // |+,g>
  Vec minus_g;       // |-,g>
  Vec vac_e;         // |0~,e>
  Mat logical_cols;  // columns |O,g>, |1,g>
};
EffectiveEmbedding make_effective_embedding(const SystemParams& p,
                                            const GateSpec& gate,
                                            const DisplacedBasis& basis);

// Order-of-magnitude consistency report for the dispersive regime. A single
// small parameter varsigma is fitted so that tier-1 ratios ~ varsigma,
// tier-2 ~ varsigma^2 and tier-3 <= varsigma^3, each within a factor of 3;
// pass means such a varsigma exists.
struct RegimeReport {
  struct Entry {
    std::string name;
    double ratio = 0.0;
    int tier = 1;
    bool within = false;
  };
  std::vector<Entry> ratios;
  double varsigma = 0.0;
  double worst_factor = 0.0;  // largest per-ratio violation factor (>1 fails)
  bool pass = false;

  std::string summary() const;
};

RegimeReport regime_check(const SystemParams& p, const DriveSpec& spec);

// key = value parameter file (linear frequencies in Hz, time in us).
struct ParamFile {
  SystemParams params;
  double theta = 0.0;
  double theta_g = 0.0;
  double chi0 = 1.0;
  GateName gate = GateName::not_gate;
};

ParamFile load_param_file(const std::string& file);
void save_param_file(const ParamFile& pf, const std::string& file);

// Shared key = value reader ('#' comments, whitespace-trimmed keys/values).
std::map<std::string, std::string> read_kv_file(const std::string& file);
ParamFile params_from_kv(const std::map<std::string, std::string>& kv);

}  // namespace bingeo
