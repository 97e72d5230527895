#include "bingeo/operators.hpp"

#include <doctest.h>

#include <cmath>

using namespace bingeo;

TEST_CASE("annihilation operator matrix elements") {
  CHECK_THROWS_AS(annihilation_op(0), std::invalid_argument);

  const auto a1 = annihilation_op(1);
  CHECK(a1.dim() == 2);
  CHECK(a1.mat(0, 1).real() == doctest::Approx(1.0).epsilon(1e-15));

  const auto a4 = annihilation_op(4);
  CHECK(a4.mat(3, 4).real() == doctest::Approx(2.0).epsilon(1e-15));

  const Mat n = a4.mat.adjoint() * a4.mat;
  for (int k = 0; k <= 4; ++k)
    CHECK(n(k, k).real() == doctest::Approx(double(k)).epsilon(1e-14));
}

TEST_CASE("displacement operator") {
  const auto id = displacement_op(0.0, 10);
  CHECK((id.mat - Mat::Identity(11, 11)).norm() < 1e-14);

  const double alpha = std::sqrt(2.0);
  const auto d = displacement_op(alpha, 30);
  // vacuum-to-vacuum amplitude from the coherent-state series
  CHECK(d.mat(0, 0).real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
  CHECK(d.unitarity_defect() < 1e-9);

  const auto dm = displacement_op(-alpha, 30);
  CHECK((d.mat * dm.mat - Mat::Identity(31, 31)).norm() < 1e-9);
}

TEST_CASE("displaced Fock states") {
  const double alpha = std::sqrt(2.0);
  const int nm = 30;

  SUBCASE("alpha = 0 gives the bare state") {
    const auto s = displaced_fock(0, 0.0, 10);
    CHECK(std::abs(s.amps(0) - 1.0) < 1e-15);
  }

  SUBCASE("out-of-range n rejected") {
    CHECK_THROWS_AS(displaced_fock(11, 0.5, 10), std::invalid_argument);
  }

  SUBCASE("displaced vacuum matches the coherent series") {
    const auto s = displaced_fock(0, alpha, nm);
    // e^{-alpha^2/2} alpha^m / sqrt(m!)
    CHECK(s.amps(0).real() == doctest::Approx(0.36787944117144233).epsilon(1e-8));
    CHECK(s.amps(2).real() == doctest::Approx(0.52026009502288890).epsilon(1e-8));
    CHECK(s.amps(4).real() == doctest::Approx(0.30037230591008530).epsilon(1e-8));
  }

  SUBCASE("displaced states stay orthonormal") {
    const auto b = make_displaced_basis(alpha, nm);
    for (int n = 0; n <= 6; ++n)
      for (int m = 0; m <= 6; ++m) {
        const Complex ip = b.coeffs.col(n).adjoint() * b.coeffs.col(m);
        CHECK(std::abs(ip - (n == m ? 1.0 : 0.0)) < 1e-8);
      }
  }
}

TEST_CASE("binomial logical states") {
  CHECK_THROWS_AS(binomial_logical_states(3), std::invalid_argument);
  const auto [zero, one] = binomial_logical_states(10);
  const Mat n = number_op(10).mat;

  const Complex n00 = zero.amps.adjoint() * n * zero.amps;
  const Complex n11 = one.amps.adjoint() * n * one.amps;
  const Complex n01 = zero.amps.adjoint() * n * one.amps;
  CHECK(n00.real() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(n11.real() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(std::abs(n01) < 1e-15);
  CHECK(std::abs(Complex(zero.amps.adjoint() * one.amps)) < 1e-15);
}

TEST_CASE("tensor embedding") {
  const int nm = 4;
  const auto ic = cavity_identity(nm);
  const auto iq = qutrit_identity();

  const auto joint_id = tensor_embed(ic, iq);
  CHECK(joint_id.dim() == 3 * (nm + 1));
  CHECK((joint_id.mat - Mat::Identity(15, 15)).norm() < 1e-15);

  const ComplexOperator nop{number_op(nm).mat, BasisTag::fock(nm)};
  const auto ng = tensor_embed(nop, qutrit_proj(kG));
  const auto two_g = joint_state(fock_state(2, nm), kG);
  const Vec applied = ng.mat * two_g.amps;
  CHECK((applied - 2.0 * two_g.amps).norm() < 1e-15);

  SUBCASE("basis tags are enforced") {
    CHECK_THROWS_AS(tensor_embed(ic, ic), std::invalid_argument);
    CHECK_THROWS_AS(tensor_embed(iq, iq), std::invalid_argument);
  }
}

TEST_CASE("operator health checks") {
  const auto a = annihilation_op(6);
  ComplexOperator h{a.mat + a.mat.adjoint(), a.basis};
  CHECK(h.is_hermitian());
  CHECK(!ComplexOperator{a.mat, a.basis}.is_hermitian());
  CHECK(displacement_op(0.7, 40).unitarity_defect() < 1e-10);
}
