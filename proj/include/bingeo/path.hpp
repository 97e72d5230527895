#pragma once

#include "bingeo/operators.hpp"

#include <functional>
#include <vector>

namespace bingeo {

enum class GateName { pi_phase, not_gate, hadamard, custom };

// A logical single-qubit gate target together with the (theta, Theta_g)
// parameters that realize it on the dressed-state path.
struct GateSpec {
  GateName name = GateName::custom;
  double theta = 0.0;    // dressed-state mixing angle, rad
  double theta_g = 0.0;  // geometric phase acquired over one cycle, rad
  Mat target_unitary;    // 2x2 on span{|O>, |1>}

  std::string label() const;
};

GateSpec make_gate(GateName name);
GateSpec custom_gate(double theta, double theta_g);

// Lewis-Riesenfeld phase bookkeeping along the "-" eigenstate branch.
struct PhaseRecord {
  double t = 0.0;
  double theta_d_minus = 0.0;  // dynamic part, rad
  double theta_g_minus = 0.0;  // geometric part, rad
  double mu_minus = 0.0;       // theta_d_minus + theta_g_minus
};

// Evolution-path parametrization. gamma2(t) carries a -Theta_g step at T/2
// on top of a smooth part that is symmetric about T/2; the smooth part and
// its derivative are supplied analytically. gamma2_dot_over_cos is
// d(gamma2_smooth)/dt / cos(gamma1), which stays finite on every path family
// used here and removes the tan(gamma1) singularity from the field formulas.
struct GeometricPath {
  double T = 0.0;        // total evolution time, s
  double theta_g = 0.0;  // step height at T/2, rad
  double chi0 = 1.0;
  int sample_count = 4001;

  std::function<double(double)> gamma1_fn;
  std::function<double(double)> gamma1_dot_fn;
  std::function<double(double)> gamma2_smooth_fn;
  std::function<double(double)> gamma2_dot_over_cos_fn;

  double gamma1(double t) const;
  double gamma1_dot(double t) const;
  double gamma2(double t) const;  // includes the step
  // Control quadratures (Omega_x, Omega_y) in rad/s.
  std::pair<double, double> control_fields(double t) const;
  // Complex drive envelope Omega_0(t) = (Omega_x + i Omega_y)/2.
  Complex omega0(double t) const;
  std::vector<double> sample_times() const;
};

// gamma1(t) = pi sin^2(pi t / T)
double gamma1_profile(double t, double T);
// gamma2(t) = -Theta_g xi(t) + chi0 (4/3) sin^3 gamma1(t), xi = [t >= T/2]
double gamma2_profile(double t, double T, double theta_g, double chi0 = 1.0);

// The error-insensitive path family of the protocol.
GeometricPath make_designed_path(double T, double theta_g, double chi0 = 1.0,
                                 int sample_count = 4001);
// Reference path with the same gate action but no smooth gamma2 part
// (gamma2 = -Theta_g xi(t) only). Used as the non-optimized baseline.
GeometricPath make_step_only_path(double T, double theta_g,
                                  int sample_count = 4001);
// gamma2_smooth = sum_k coeffs[k] sin^k(gamma1), symmetric about T/2 by
// construction. Test fodder for the phase-cancellation property.
GeometricPath make_sine_poly_path(double T, double theta_g,
                                  const std::vector<double>& coeffs,
                                  int sample_count = 4001);

// Cumulative LR phases up to time t; the gamma2 step contribution at T/2 is
// added analytically. Throws if the quadrature cannot reach tolerance.
PhaseRecord lr_phases(const GeometricPath& path, double t,
                      double tol = 1e-9);
// Uniform-grid phase table (includes both endpoints).
std::vector<PhaseRecord> lr_phase_table(const GeometricPath& path, int points,
                                        double tol = 1e-9);

// Dynamical invariant I(gamma1, gamma2) on the effective two-level space
// {|+,g>, |0~,e>}: sin g1 sin g2 sx + sin g1 cos g2 sy + cos g1 sz.
ComplexOperator invariant_op(double gamma1, double gamma2);
// Its +/- eigenvectors in the same coordinates.
Vec invariant_eigvec_plus(double gamma1, double gamma2);
Vec invariant_eigvec_minus(double gamma1, double gamma2);

// Effective Pauli operators on {|+,g>, |0~,e>} (index 0 = |+,g>).
Mat effective_sigma_x();
Mat effective_sigma_y();
Mat effective_sigma_z();

// Systematic-error sensitivity |int_0^T e^{i chi} gamma1_dot sin^2 gamma1 dt|^2
// with chi(t) = gamma2(t) + 2 mu_-(t) taken from the phase bookkeeping.
double sensitivity_Qg(const GeometricPath& path, double tol = 1e-9);

// Logical gate unitary from the dressed-state projectors,
// U = e^{i Theta_g} |+><+| + |-><-|, as a 2x2 matrix on span{|O>, |1>}.
Mat gate_unitary(double theta, double theta_g);
Mat gate_unitary(const GateSpec& gate);

// Dressed logical states in {|O>, |1>} coordinates.
Vec dressed_plus(double theta);
Vec dressed_minus(double theta);

}  // namespace bingeo
