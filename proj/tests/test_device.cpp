#include "bingeo/device.hpp"

#include "bingeo/metrics.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

using namespace bingeo;

namespace {

struct Ctx {
  SystemParams p = SystemParams::paper_defaults();
  GateSpec gate = make_gate(GateName::not_gate);
  GeometricPath path;
  DisplacedBasis basis;
  DriveSpec spec;

  Ctx() {
    path = make_designed_path(p.T, gate.theta_g);
    basis = make_displaced_basis(p.alpha0, p.n_max);
    spec = derive_drive_spec(p, gate, path, basis);
  }
};

}  // namespace

TEST_CASE("derived drive parameters match the device arithmetic") {
  Ctx c;
  // omega_tilde = delta + lambda^2 / Delta
  const double omega_tilde_hz = c.spec.omega_tilde / kTwoPi;
  CHECK(omega_tilde_hz == doctest::Approx(32.6535565e6).epsilon(1e-6));
  // Omega = -omega_tilde alpha0 Delta / lambda
  CHECK(c.spec.Omega / kTwoPi == doctest::Approx(-477.7887e6).epsilon(1e-4));
  CHECK(std::abs(c.spec.Omega / c.p.Delta) == doctest::Approx(0.100).epsilon(2e-2));
  // tone spacing
  CHECK(c.spec.Delta_p[1] - c.spec.Delta_p[0] ==
        doctest::Approx(2.0 * c.p.delta).epsilon(1e-12));
  CHECK(c.spec.Delta_p[2] - c.spec.Delta_p[0] ==
        doctest::Approx(4.0 * c.p.delta).epsilon(1e-12));

  SUBCASE("tiny displaced-vacuum coefficients are rejected") {
    SystemParams p2 = c.p;
    p2.alpha0 = 0.05;  // beta_{2,0}, beta_{4,0} collapse toward zero
    const auto basis2 = make_displaced_basis(p2.alpha0, p2.n_max);
    CHECK_THROWS_AS(derive_drive_spec(p2, c.gate, c.path, basis2),
                    std::invalid_argument);
  }
}

TEST_CASE("full Hamiltonian structure") {
  Ctx c;
  const FullModel fm = make_full_model(c.p, c.spec);
  const int nc = c.p.n_max + 1;

  SUBCASE("hermitian at sampled times") {
    for (double frac : {0.0, 0.13, 0.5, 0.77}) {
      ComplexOperator h{fm.hamiltonian(frac * c.p.T), BasisTag::joint(c.p.n_max)};
      CHECK(h.hermiticity_defect() < 1e-14);
    }
  }

  SUBCASE("g-e coupling equals the summed tones") {
    const double t = 0.31 * c.p.T;
    const Mat h = fm.hamiltonian(t);
    Complex expect = 0.0;
    for (int k = 0; k < 3; ++k)
      expect += c.spec.omega_tilde_2k(k, t) *
                std::exp(Complex(0, -c.spec.Delta_p[k] * t));
    for (int n = 0; n < nc; n += 7)
      CHECK(std::abs(h(kG * nc + n, kE * nc + n) - expect) < 1e-9 * std::abs(expect) + 1e-12);
    // boundary: all tone envelopes vanish with the pulse
    const Mat h0 = fm.hamiltonian(0.0);
    CHECK(std::abs(h0(kG * nc + 3, kE * nc + 3)) < 1e-9);
  }

  SUBCASE("e-f ladder elements carry lambda sqrt(n+1)") {
    const Mat h = fm.hamiltonian(0.42 * c.p.T);
    for (int n = 0; n + 1 < nc; n += 5)
      CHECK(h(kE * nc + n + 1, kF * nc + n).real() ==
            doctest::Approx(c.p.lambda * std::sqrt(double(n + 1))).epsilon(1e-12));
  }

  SUBCASE("with the drive silenced the g sector decouples") {
    DriveSpec mute = c.spec;
    mute.omega0_envelope = [](double) { return Complex(0, 0); };
    const FullModel fm2 = make_full_model(c.p, mute);
    const Mat h = fm2.hamiltonian(0.2 * c.p.T);
    for (int n = 0; n < nc; ++n) {
      CHECK(h.row(kG * nc + n).segment(kE * nc, 2 * nc).norm() < 1e-15);
      CHECK(h(kG * nc + n, kG * nc + n).real() ==
            doctest::Approx(c.p.delta * n).epsilon(1e-14));
      CHECK(h(kF * nc + n, kF * nc + n).real() ==
            doctest::Approx(c.p.delta * n - c.p.Delta).epsilon(1e-14));
    }
  }
}

TEST_CASE("effective Hamiltonian") {
  Ctx c;
  SUBCASE("vanishes at the boundary") {
    CHECK(effective_hamiltonian(c.path, 0.0).mat.norm() < 1e-9);
  }
  SUBCASE("dark state row stays zero") {
    for (double frac : {0.1, 0.35, 0.62, 0.9}) {
      const Mat h = effective_hamiltonian(c.path, frac * c.p.T).mat;
      CHECK(h.row(1).norm() == 0.0);
      CHECK(h.col(1).norm() == 0.0);
    }
  }
  SUBCASE("bright block is (Ox sx + Oy sy)/2") {
    const double t = 0.27 * c.p.T;
    auto [ox, oy] = c.path.control_fields(t);
    const Mat h = effective_hamiltonian(c.path, t).mat;
    Mat block(2, 2);
    block << h(0, 0), h(0, 2), h(2, 0), h(2, 2);
    const Mat ref =
        0.5 * (ox * effective_sigma_x() + oy * effective_sigma_y());
    CHECK((block - ref).norm() < 1e-12);
  }
}

TEST_CASE("frame correction") {
  Ctx c;
  const Mat c0 = frame_correction(c.p, c.spec, c.basis, 0.0);
  CHECK((c0 - Mat::Identity(c0.rows(), c0.cols())).norm() < 1e-12);

  // commensurate delta*T: g branch returns to identity at T
  CHECK(c.p.delta * c.p.T / kTwoPi == doctest::Approx(-60.0).epsilon(1e-12));
  const Mat cT = frame_correction(c.p, c.spec, c.basis, c.p.T);
  const int nc = c.p.n_max + 1;
  CHECK((cT.block(0, 0, nc, nc) - Mat::Identity(nc, nc)).norm() < 1e-9);

  ComplexOperator u{cT, BasisTag::joint(c.p.n_max)};
  CHECK(u.unitarity_defect() < 1e-9);
}

TEST_CASE("regime check") {
  Ctx c;
  const RegimeReport r = regime_check(c.p, c.spec);
  CHECK(r.pass);

  auto find = [&](const std::string& name) {
    for (const auto& e : r.ratios)
      if (e.name == name) return e.ratio;
    FAIL("missing ratio ", name);
    return 0.0;
  };
  CHECK(find("Omega/Delta") == doctest::Approx(0.100).epsilon(2e-2));
  CHECK(find("delta/Delta") == doctest::Approx(2.51e-3).epsilon(2e-2));
  CHECK(find("lambda*sqrt(N+1)/Delta") == doctest::Approx(0.167).epsilon(1e-2));

  SUBCASE("scaling Delta breaks tier consistency") {
    SystemParams p2 = c.p;
    p2.Delta *= 10.0;
    const RegimeReport r2 = regime_check(p2, c.spec);
    CHECK(!r2.pass);
  }
}

TEST_CASE("parameter file round trip") {
  ParamFile pf;
  pf.params = SystemParams::paper_defaults();
  pf.gate = GateName::hadamard;
  const GateSpec g = make_gate(GateName::hadamard);
  pf.theta = g.theta;
  pf.theta_g = g.theta_g;
  pf.chi0 = 1.0;

  const std::string path = "test_params.conf";
  save_param_file(pf, path);
  // loader multiplies linear Hz by 2*pi
  const ParamFile back = load_param_file(path);
  CHECK(back.params.lambda == doctest::Approx(pf.params.lambda).epsilon(1e-10));
  CHECK(back.params.delta == doctest::Approx(pf.params.delta).epsilon(1e-10));
  CHECK(back.params.T == doctest::Approx(pf.params.T).epsilon(1e-10));
  CHECK(back.params.n_max == pf.params.n_max);
  CHECK(back.theta == doctest::Approx(pf.theta).epsilon(1e-10));

  std::ofstream bad("test_params_bad.conf");
  bad << "gate = toffoli\n";
  bad.close();
  CHECK_THROWS(load_param_file("test_params_bad.conf"));
  std::remove(path.c_str());
  std::remove("test_params_bad.conf");
}
