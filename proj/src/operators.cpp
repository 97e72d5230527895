#include "bingeo/operators.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

namespace bingeo {

int BasisTag::dim() const {
  switch (kind) {
    case Kind::fock: return n_max + 1;
    case Kind::qutrit: return 3;
    case Kind::joint: return 3 * (n_max + 1);
    case Kind::effective2: return 2;
    case Kind::effective3: return 3;
  }
  return 0;
}

std::string BasisTag::str() const {
  switch (kind) {
    case Kind::fock: return "fock(" + std::to_string(n_max) + ")";
    case Kind::qutrit: return "qutrit";
    case Kind::joint: return "joint(" + std::to_string(n_max) + ")";
    case Kind::effective2: return "effective2";
    case Kind::effective3: return "effective3";
  }
  return "?";
}

double ComplexOperator::hermiticity_defect() const {
  double scale = mat.norm();
  if (scale == 0.0) return 0.0;
  return (mat - mat.adjoint()).norm() / scale;
}

double ComplexOperator::unitarity_defect() const {
  Mat g = mat.adjoint() * mat;
  g.diagonal().array() -= 1.0;
  return g.norm();
}

Mat expm(const Mat& a) { return a.exp(); }

ComplexOperator annihilation_op(int n_max) {
  if (n_max < 1) throw std::invalid_argument("annihilation_op: n_max must be >= 1");
  Mat a = Mat::Zero(n_max + 1, n_max + 1);
  for (int n = 0; n < n_max; ++n) a(n, n + 1) = std::sqrt(double(n + 1));
  return {std::move(a), BasisTag::fock(n_max)};
}

ComplexOperator creation_op(int n_max) {
  ComplexOperator a = annihilation_op(n_max);
  a.mat = a.mat.adjoint().eval();
  return a;
}

ComplexOperator number_op(int n_max) {
  Mat n = Mat::Zero(n_max + 1, n_max + 1);
  for (int k = 0; k <= n_max; ++k) n(k, k) = double(k);
  return {std::move(n), BasisTag::fock(n_max)};
}

ComplexOperator cavity_identity(int n_max) {
  return {Mat::Identity(n_max + 1, n_max + 1), BasisTag::fock(n_max)};
}

ComplexOperator displacement_op(double alpha, int n_max) {
  ComplexOperator a = annihilation_op(n_max);
  Mat gen = alpha * (a.mat.adjoint() - a.mat);
  return {expm(gen), BasisTag::fock(n_max)};
}

DisplacedBasis make_displaced_basis(double alpha, int n_max) {
  DisplacedBasis b;
  b.alpha0 = alpha;
  b.n_max = n_max;
  b.coeffs = displacement_op(alpha, n_max).mat;
  return b;
}

StateVector fock_state(int n, int n_max) {
  if (n < 0 || n > n_max) throw std::invalid_argument("fock_state: n out of range");
  Vec v = Vec::Zero(n_max + 1);
  v(n) = 1.0;
  return {std::move(v), BasisTag::fock(n_max)};
}

StateVector displaced_fock(int n, double alpha, int n_max) {
  if (n < 0 || n > n_max) throw std::invalid_argument("displaced_fock: n out of range");
  ComplexOperator d = displacement_op(alpha, n_max);
  return {d.mat.col(n), BasisTag::fock(n_max)};
}

std::pair<StateVector, StateVector> binomial_logical_states(int n_max) {
  if (n_max < 4)
    throw std::invalid_argument("binomial_logical_states: n_max must be >= 4");
  Vec zero = Vec::Zero(n_max + 1);
  zero(0) = 1.0 / std::sqrt(2.0);
  zero(4) = 1.0 / std::sqrt(2.0);
  Vec one = Vec::Zero(n_max + 1);
  one(2) = 1.0;
  return {StateVector{std::move(zero), BasisTag::fock(n_max)},
          StateVector{std::move(one), BasisTag::fock(n_max)}};
}

ComplexOperator qutrit_identity() {
  return {Mat::Identity(3, 3), BasisTag::qutrit()};
}

ComplexOperator qutrit_proj(int level) {
  Mat p = Mat::Zero(3, 3);
  p(level, level) = 1.0;
  return {std::move(p), BasisTag::qutrit()};
}

ComplexOperator qutrit_transfer(int to, int from) {
  Mat p = Mat::Zero(3, 3);
  p(to, from) = 1.0;
  return {std::move(p), BasisTag::qutrit()};
}

ComplexOperator tensor_embed(const ComplexOperator& cavity_op,
                             const ComplexOperator& qutrit_op) {
  if (cavity_op.basis.kind != BasisTag::Kind::fock)
    throw std::invalid_argument("tensor_embed: first operand must be fock, got " +
                                cavity_op.basis.str());
  if (qutrit_op.basis.kind != BasisTag::Kind::qutrit)
    throw std::invalid_argument("tensor_embed: second operand must be qutrit, got " +
                                qutrit_op.basis.str());
  const int nc = cavity_op.dim();
  Mat out = Mat::Zero(3 * nc, 3 * nc);
  for (int q = 0; q < 3; ++q)
    for (int p = 0; p < 3; ++p)
      if (qutrit_op.mat(q, p) != 0.0)
        out.block(q * nc, p * nc, nc, nc) = qutrit_op.mat(q, p) * cavity_op.mat;
  return {std::move(out), BasisTag::joint(cavity_op.basis.n_max)};
}

StateVector joint_state(const StateVector& cavity, int level) {
  if (cavity.basis.kind != BasisTag::Kind::fock)
    throw std::invalid_argument("joint_state: cavity state must be fock-tagged");
  const int nc = cavity.dim();
  Vec v = Vec::Zero(3 * nc);
  v.segment(level * nc, nc) = cavity.amps;
  return {std::move(v), BasisTag::joint(cavity.basis.n_max)};
}

}  // namespace bingeo
