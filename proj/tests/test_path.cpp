#include "bingeo/path.hpp"

#include <doctest.h>

#include <cmath>

using namespace bingeo;

namespace {
constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kT = 5e-6;
}  // namespace

TEST_CASE("gamma1 profile") {
  CHECK(gamma1_profile(0.0, kT) == doctest::Approx(0.0));
  CHECK(gamma1_profile(kT / 2, kT) == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(gamma1_profile(kT / 4, kT) == doctest::Approx(kPi / 2).epsilon(1e-14));

  const auto p = make_designed_path(kT, kPi);
  CHECK_THROWS_AS(p.gamma1(-1e-9), std::invalid_argument);
  CHECK_THROWS_AS(p.gamma1(kT + 1e-9), std::invalid_argument);
}

TEST_CASE("gamma2 profile and step") {
  CHECK(gamma2_profile(0.0, kT, kPi) == doctest::Approx(0.0));
  // endpoint lands at -Theta_g, which is pi mod 2pi for the listed gates
  const double g2T = gamma2_profile(kT, kT, kPi);
  CHECK(g2T == doctest::Approx(-kPi).epsilon(1e-12));
  const double mod = std::fmod(g2T + 4 * kPi, 2 * kPi);
  CHECK(mod == doctest::Approx(kPi).epsilon(1e-12));
  // before the step: (4/3) sin^3(pi/2)
  CHECK(gamma2_profile(kT / 4, kT, kPi) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));

  const auto p = make_designed_path(kT, kPi);
  CHECK(std::abs(p.gamma2(kT / 2 - 1e-12)) < 1e-6);  // smooth part only
  CHECK(p.gamma2(kT / 2) == doctest::Approx(-kPi).epsilon(1e-9));
  // gamma1 symmetry about T/2 on a grid
  for (int i = 0; i <= 100; ++i) {
    const double t = kT * i / 100.0;
    CHECK(p.gamma1(t) == doctest::Approx(p.gamma1(kT - t)).epsilon(1e-12));
  }
}

TEST_CASE("control fields") {
  const auto p = make_designed_path(kT, kPi);

  SUBCASE("boundary values vanish") {
    auto [x0, y0] = p.control_fields(0.0);
    CHECK(std::abs(x0) < 1e-9);
    CHECK(std::abs(y0) < 1e-9);
    auto [xm, ym] = p.control_fields(kT / 2);
    CHECK(std::abs(xm) < 1e-9);
    CHECK(std::abs(ym) < 1e-9);
  }

  SUBCASE("matches the unsubstituted expression by finite differences") {
    const double t = kT / 8;
    const double h = 1e-7 * kT;
    const double g1 = p.gamma1(t);
    const double g2 = p.gamma2(t);
    const double g1d = (p.gamma1(t + h) - p.gamma1(t - h)) / (2 * h);
    const double g2d = (p.gamma2(t + h) - p.gamma2(t - h)) / (2 * h);
    const double ox_ref = -(g1d * std::cos(g2) - g2d * std::tan(g1) * std::sin(g2));
    const double oy_ref = g1d * std::sin(g2) + g2d * std::tan(g1) * std::cos(g2);
    auto [ox, oy] = p.control_fields(t);
    CHECK(ox == doctest::Approx(ox_ref).epsilon(1e-6));
    CHECK(oy == doctest::Approx(oy_ref).epsilon(1e-6));
  }

  SUBCASE("finite at gamma1 = pi/2") {
    auto [ox, oy] = p.control_fields(kT / 4);
    CHECK(std::isfinite(ox));
    CHECK(std::isfinite(oy));
  }
}

TEST_CASE("LR phases") {
  const auto p = make_designed_path(kT, kPi);

  const PhaseRecord r0 = lr_phases(p, 0.0);
  CHECK(std::abs(r0.theta_d_minus) < 1e-12);
  CHECK(std::abs(r0.theta_g_minus) < 1e-12);

  for (double theta_g : {kPi}) {
    const auto path = make_designed_path(kT, theta_g);
    const PhaseRecord rT = lr_phases(path, kT);
    CHECK(std::abs(rT.theta_d_minus) < 1e-6);
    CHECK(rT.theta_g_minus == doctest::Approx(theta_g).epsilon(1e-6));
    CHECK(rT.mu_minus == rT.theta_d_minus + rT.theta_g_minus);
  }

  SUBCASE("table matches pointwise evaluation") {
    const auto table = lr_phase_table(p, 101);
    CHECK(table.size() == 101);
    const PhaseRecord mid = lr_phases(p, table[37].t);
    CHECK(table[37].theta_d_minus == doctest::Approx(mid.theta_d_minus).epsilon(1e-9));
    CHECK(table[37].theta_g_minus == doctest::Approx(mid.theta_g_minus).epsilon(1e-9));
  }
}

TEST_CASE("invariant operator") {
  const auto iz = invariant_op(0.0, 0.3);
  CHECK((iz.mat - effective_sigma_z()).norm() < 1e-14);

  const auto iy = invariant_op(kPi / 2, 0.0);
  CHECK((iy.mat - effective_sigma_y()).norm() < 1e-14);

  for (double g1 : {0.2, 1.1, 2.9})
    for (double g2 : {-1.0, 0.4, 3.0}) {
      const auto inv = invariant_op(g1, g2);
      CHECK(inv.is_hermitian(1e-13));
      Eigen::SelfAdjointEigenSolver<Mat> es(inv.mat);
      CHECK(es.eigenvalues()(0) == doctest::Approx(-1.0).epsilon(1e-12));
      CHECK(es.eigenvalues()(1) == doctest::Approx(1.0).epsilon(1e-12));

      const Vec vp = invariant_eigvec_plus(g1, g2);
      const Vec vm = invariant_eigvec_minus(g1, g2);
      CHECK((inv.mat * vp - vp).norm() < 1e-12);
      CHECK((inv.mat * vm + vm).norm() < 1e-12);
      CHECK(std::abs(Complex(vp.adjoint() * vm)) < 1e-12);
    }
}

TEST_CASE("systematic-error sensitivity") {
  SUBCASE("designed path nullifies Q_g") {
    for (double theta_g : {kPi, kPi / 2}) {
      const auto p = make_designed_path(kT, theta_g, 1.0);
      CHECK(sensitivity_Qg(p) < 1e-6);
    }
    CHECK(sensitivity_Qg(make_designed_path(kT, kPi, 2.0)) < 1e-6);
  }

  SUBCASE("step-only reference is strictly positive") {
    const auto ref = make_step_only_path(kT, kPi);
    const double qg = sensitivity_Qg(ref);
    // chi reduces to Theta_g xi(t), so the two half-pulses add as
    // (1 - e^{i Theta_g}) (pi/2) and Q_g = pi^2 sin^2(Theta_g/2).
    CHECK(qg == doctest::Approx(kPi * kPi).epsilon(1e-6));

    // independent trapezoid evaluation of the same functional
    const int n = 200001;
    const double h = kT / (n - 1);
    Complex acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double t = i * h;
      const double g1 = ref.gamma1(t);
      const double g1d = (kPi * kPi / kT) * std::sin(2 * kPi * t / kT);
      const double chi = (t >= kT / 2) ? kPi : 0.0;  // gamma2 + 2 mu_-
      const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      acc += w * h * std::exp(Complex(0, chi)) * g1d * std::sin(g1) * std::sin(g1);
    }
    CHECK(std::norm(acc) == doctest::Approx(qg).epsilon(1e-6));
  }

  SUBCASE("frozen path has zero sensitivity") {
    GeometricPath flat = make_step_only_path(kT, kPi);
    flat.gamma1_fn = [](double) { return 0.3; };
    flat.gamma1_dot_fn = [](double) { return 0.0; };
    CHECK(sensitivity_Qg(flat) < 1e-12);
  }

  SUBCASE("non-integer chi0 leaves a positive residual") {
    const auto p = make_designed_path(kT, kPi, 0.5);
    CHECK(sensitivity_Qg(p) > 1e-2);
  }
}

TEST_CASE("gate unitary from dressed projectors") {
  SUBCASE("pi-phase") {
    const Mat u = gate_unitary(kPi, kPi);
    Mat expect(2, 2);
    expect << -1, 0, 0, 1;
    CHECK((u - expect).norm() < 1e-12);
  }
  SUBCASE("NOT") {
    const Mat u = gate_unitary(kPi / 4, kPi);
    Mat expect(2, 2);
    expect << 0, -1, -1, 0;
    CHECK((u - expect).norm() < 1e-12);
  }
  SUBCASE("Hadamard") {
    const Mat u = gate_unitary(kPi / 8, kPi);
    const Mat expect = -make_gate(GateName::hadamard).target_unitary;
    CHECK((u - expect).norm() < 1e-12);
  }
  SUBCASE("zero geometric phase gives identity") {
    for (double theta : {0.1, 0.7, 2.0}) {
      const Mat u = gate_unitary(theta, 0.0);
      CHECK((u - Mat::Identity(2, 2)).norm() < 1e-12);
    }
  }
  SUBCASE("named gates carry Table-correct parameters") {
    CHECK(make_gate(GateName::pi_phase).theta == doctest::Approx(kPi));
    CHECK(make_gate(GateName::not_gate).theta == doctest::Approx(kPi / 4));
    CHECK(make_gate(GateName::hadamard).theta == doctest::Approx(kPi / 8));
    for (auto name : {GateName::pi_phase, GateName::not_gate, GateName::hadamard}) {
      const GateSpec g = make_gate(name);
      CHECK(g.theta_g == doctest::Approx(kPi));
      ComplexOperator u{g.target_unitary, BasisTag::effective2()};
      CHECK(u.unitarity_defect() < 1e-12);
    }
  }
}
