#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <utility>

namespace bingeo {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Qutrit level indices used everywhere.
inline constexpr int kG = 0;
inline constexpr int kE = 1;
inline constexpr int kF = 2;

// Identifies the vector space a state or operator lives in. Joint-space
// ordering is qutrit-slow, cavity-fast: index = level*(n_max+1) + n.
struct BasisTag {
  enum class Kind { fock, qutrit, joint, effective2, effective3 };
  Kind kind = Kind::fock;
  int n_max = 0;  // Fock cutoff, meaningful for fock/joint

  int dim() const;
  std::string str() const;
  bool operator==(const BasisTag&) const = default;

  static BasisTag fock(int n_max) { return {Kind::fock, n_max}; }
  static BasisTag qutrit() { return {Kind::qutrit, 0}; }
  static BasisTag joint(int n_max) { return {Kind::joint, n_max}; }
  static BasisTag effective2() { return {Kind::effective2, 0}; }
  static BasisTag effective3() { return {Kind::effective3, 0}; }
};

// Dense square operator together with its basis label.
struct ComplexOperator {
  Mat mat;
  BasisTag basis;

  int dim() const { return static_cast<int>(mat.rows()); }
  // Relative Frobenius deviation from Hermiticity.
  double hermiticity_defect() const;
  bool is_hermitian(double tol = 1e-12) const { return hermiticity_defect() <= tol; }
  // ||U^dag U - I||_F
  double unitarity_defect() const;
};

struct StateVector {
  Vec amps;
  BasisTag basis;

  int dim() const { return static_cast<int>(amps.size()); }
  double norm() const { return amps.norm(); }
};

// Expansion table beta(m,n) = <m|D(alpha0)|n> of displaced Fock states in
// the bare Fock basis; column n is the displaced state |n~>.
struct DisplacedBasis {
  double alpha0 = 0.0;
  int n_max = 0;
  Mat coeffs;

  Complex beta(int m, int n) const { return coeffs(m, n); }
};

// Matrix exponential, scaling-and-squaring with Pade approximant.
Mat expm(const Mat& a);

ComplexOperator annihilation_op(int n_max);
ComplexOperator creation_op(int n_max);
ComplexOperator number_op(int n_max);
ComplexOperator cavity_identity(int n_max);

// D(alpha) = exp[alpha (a^dag - a)] for real alpha.
ComplexOperator displacement_op(double alpha, int n_max);
DisplacedBasis make_displaced_basis(double alpha, int n_max);

StateVector fock_state(int n, int n_max);
// D(alpha)|n>
StateVector displaced_fock(int n, double alpha, int n_max);

// Logical code words: |O> = (|0>+|4>)/sqrt(2), |1> = |2>. Requires n_max >= 4.
std::pair<StateVector, StateVector> binomial_logical_states(int n_max);

ComplexOperator qutrit_identity();
ComplexOperator qutrit_proj(int level);                 // |j><j|
ComplexOperator qutrit_transfer(int to, int from);      // |to><from|

// Kronecker embedding into the joint space, qutrit index slow, cavity fast.
ComplexOperator tensor_embed(const ComplexOperator& cavity_op,
                             const ComplexOperator& qutrit_op);

// Cavity state placed in one qutrit level of the joint space.
StateVector joint_state(const StateVector& cavity, int level);

}  // namespace bingeo
