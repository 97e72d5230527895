#include "bingeo/metrics.hpp"

#include <doctest.h>

#include <cmath>

using namespace bingeo;

namespace {
constexpr double kPi = 3.14159265358979323846264338328;
}

TEST_CASE("average gate fidelity") {
  Mat sz(2, 2), sx(2, 2);
  sz << 1, 0, 0, -1;
  sx << 0, 1, 1, 0;

  SUBCASE("exact gate gives 1") {
    const Mat m = sz.adjoint() * sz;
    CHECK(average_gate_fidelity(m) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("traceless product gives 1/3") {
    const Mat m = sz.adjoint() * sx;
    CHECK(average_gate_fidelity(m) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("total leakage gives 0") {
    CHECK(average_gate_fidelity(Mat::Zero(2, 2)) == doctest::Approx(0.0));
  }
  SUBCASE("global phase cancels exactly") {
    for (double phi : {0.3, 1.9, 4.4}) {
      const Mat u = std::exp(Complex(0, phi)) * sx;
      CHECK(average_gate_fidelity(sx.adjoint() * u) ==
            doctest::Approx(1.0).epsilon(1e-15));
    }
  }
  SUBCASE("leakage keeps fidelity below 1") {
    Mat m = 0.9 * sx.adjoint() * sx;  // 10% amplitude lost outside the code space
    CHECK(average_gate_fidelity(m) < 1.0);
    CHECK((m.adjoint() * m).trace().real() < 2.0);
  }
  SUBCASE("dimension checks") {
    CHECK_THROWS_AS(average_gate_fidelity(Mat::Zero(3, 3)), std::invalid_argument);
  }
}

TEST_CASE("target gates") {
  const auto gates = target_gates();
  const Mat upi = gates[0].target_unitary;
  const Mat unot = gates[1].target_unitary;
  const Mat uh = gates[2].target_unitary;

  CHECK((uh * uh - Mat::Identity(2, 2)).norm() < 1e-14);
  CHECK((uh - (upi + unot) / std::sqrt(2.0)).norm() < 1e-14);
  for (const auto& g : gates) {
    ComplexOperator u{g.target_unitary, BasisTag::effective2()};
    CHECK(u.unitarity_defect() < 1e-14);
    CHECK(u.is_hermitian(1e-14));
  }
  // projector-construction route lands on the same gates up to global phase
  for (const auto& g : gates) {
    const Mat got = gate_unitary(g);
    CHECK(average_gate_fidelity(g.target_unitary.adjoint() * got) ==
          doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK((gate_unitary(kPi / 8, kPi) + uh).norm() < 1e-12);
}

TEST_CASE("state fidelity") {
  Vec t0(3);
  t0 << 1, 0, 0;
  Vec t1(3);
  t1 << 0, 1, 0;

  const Mat rho_pure = t0 * t0.adjoint();
  CHECK(state_fidelity(rho_pure, t0) == doctest::Approx(1.0));
  CHECK(state_fidelity(rho_pure, t1) == doctest::Approx(0.0));

  Mat mixed = Mat::Zero(3, 3);
  mixed(0, 0) = 0.5;
  mixed(1, 1) = 0.5;
  CHECK(state_fidelity(mixed, t0) == doctest::Approx(0.5));

  Mat bad = rho_pure;
  bad(0, 1) = 0.3;  // not Hermitian
  CHECK_THROWS_AS(state_fidelity(bad, t0), std::invalid_argument);
}

TEST_CASE("exponential fit") {
  SUBCASE("noiseless round trip") {
    std::vector<double> r, f;
    const double a = -0.005, b = 0.17, c = 0.993;
    for (int i = 5; i <= 20; ++i) {
      r.push_back(double(i));
      f.push_back(a * std::exp(-b * i) + c);
    }
    const ExpFit fit = fit_exponential(r, f);
    CHECK(fit.a == doctest::Approx(a).epsilon(1e-6));
    CHECK(fit.b == doctest::Approx(b).epsilon(1e-6));
    CHECK(fit.c == doctest::Approx(c).epsilon(1e-6));
    CHECK(fit.rms_residual < 1e-8);
    CHECK(fit.b_identifiable);
  }

  SUBCASE("constant data flags b as unidentifiable") {
    std::vector<double> r{5, 10, 15, 20}, f{0.99, 0.99, 0.99, 0.99};
    const ExpFit fit = fit_exponential(r, f);
    CHECK(std::abs(fit.a) < 1e-9);
    CHECK(fit.c == doctest::Approx(0.99));
    CHECK(!fit.b_identifiable);
  }

  SUBCASE("input validation") {
    CHECK_THROWS_AS(fit_exponential({1, 2, 3}, {1, 2, 3}), std::invalid_argument);
    CHECK_THROWS_AS(fit_exponential({1, 2, 2, 4}, {1, 2, 3, 4}),
                    std::invalid_argument);
  }

  SUBCASE("falling curve") {
    std::vector<double> r, f;
    for (int i = 0; i < 12; ++i) {
      r.push_back(double(i));
      f.push_back(0.4 * std::exp(-0.5 * i) + 0.1);
    }
    const ExpFit fit = fit_exponential(r, f);
    CHECK(fit.a == doctest::Approx(0.4).epsilon(1e-5));
    CHECK(fit.b == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(fit.c == doctest::Approx(0.1).epsilon(1e-5));
  }
}

TEST_CASE("fidelity trace validation") {
  FidelityTrace tr;
  tr.times = {0, 1, 2};
  tr.values = {0.5, 1.0 + 5e-10, 1.0};
  tr.validate_and_clip();
  CHECK(tr.values[1] == 1.0);

  FidelityTrace bad;
  bad.times = {0};
  bad.values = {1.2};
  CHECK_THROWS(bad.validate_and_clip());
}
