#pragma once

#include "bingeo/operators.hpp"
#include "bingeo/path.hpp"

#include <array>
#include <vector>

namespace bingeo {

struct FidelityTrace {
  std::vector<double> times;
  std::vector<double> values;

  // Clamps tiny numerical overshoots; anything beyond tolerance throws.
  void validate_and_clip(double tol = 1e-9);
};

// Average gate fidelity [Tr(M^dag M) + |Tr M|^2] / (l(l+1)) with l = 2 and
// M = P_c U_T^dag U(t) P_c restricted to the logical subspace.
double average_gate_fidelity(const Mat& m);
// Columns u_cols are U(t) applied to the logical basis states (the columns
// of logical_basis); target is the 2x2 logical gate.
double average_gate_fidelity(const Mat& u_cols, const Mat& logical_basis,
                             const Mat& target);

// The three benchmark gates with their path parameters.
std::array<GateSpec, 3> target_gates();

// <target| rho |target> for a pure target state.
double state_fidelity(const Mat& rho, const Vec& target);

// Least-squares fit of F = a exp(-b R) + c. Seeded by a log-linearization,
// refined by Levenberg-Marquardt with the analytic Jacobian. For data with
// no resolvable decay the fit degrades to a constant and b is flagged as
// unidentifiable.
struct ExpFit {
  double a = 0.0, b = 0.0, c = 0.0;
  double rms_residual = 0.0;
  bool b_identifiable = true;
  int iterations = 0;
  bool converged = false;
};

ExpFit fit_exponential(const std::vector<double>& r,
                       const std::vector<double>& f);

}  // namespace bingeo
