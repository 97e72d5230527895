#include "bingeo/path.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <stdexcept>

namespace bingeo {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;

void check_time(double t, double T, const char* who) {
  if (!(t >= 0.0 && t <= T))
    throw std::invalid_argument(std::string(who) + ": t outside [0, T]");
}

using gk15 = boost::math::quadrature::gauss_kronrod<double, 15>;

// Adaptive integral with a convergence report. The built-in Kronrod error
// estimate accumulates roundoff on oscillatory integrands, so convergence is
// judged by agreement between two refinement depths.
double integrate_checked(const std::function<double(double)>& f, double a,
                         double b, double tol, const char* who) {
  if (b <= a) return 0.0;
  const double v1 = gk15::integrate(f, a, b, 7, 1e-12);
  const double v2 = gk15::integrate(f, a, b, 9, 1e-12);
  const double achieved = std::abs(v1 - v2);
  if (achieved > tol)
    throw std::runtime_error(std::string(who) +
                             ": quadrature did not converge, achieved " +
                             std::to_string(achieved) + " vs tol " +
                             std::to_string(tol));
  return v2;
}

}  // namespace

std::string GateSpec::label() const {
  switch (name) {
    case GateName::pi_phase: return "pi_phase";
    case GateName::not_gate: return "not";
    case GateName::hadamard: return "hadamard";
    case GateName::custom: return "custom";
  }
  return "?";
}

GateSpec make_gate(GateName name) {
  GateSpec g;
  g.name = name;
  g.target_unitary = Mat::Zero(2, 2);
  switch (name) {
    case GateName::pi_phase:
      g.theta = kPi;
      g.theta_g = kPi;
      g.target_unitary << 1, 0, 0, -1;
      break;
    case GateName::not_gate:
      g.theta = kPi / 4.0;
      g.theta_g = kPi;
      g.target_unitary << 0, 1, 1, 0;
      break;
    case GateName::hadamard:
      g.theta = kPi / 8.0;
      g.theta_g = kPi;
      g.target_unitary << 1, 1, 1, -1;
      g.target_unitary /= std::sqrt(2.0);
      break;
    case GateName::custom:
      throw std::invalid_argument("make_gate: use custom_gate(theta, theta_g)");
  }
  return g;
}

GateSpec custom_gate(double theta, double theta_g) {
  GateSpec g;
  g.name = GateName::custom;
  g.theta = theta;
  g.theta_g = theta_g;
  g.target_unitary = gate_unitary(theta, theta_g);
  return g;
}

double gamma1_profile(double t, double T) {
  const double s = std::sin(kPi * t / T);
  return kPi * s * s;
}

double gamma2_profile(double t, double T, double theta_g, double chi0) {
  const double g1 = gamma1_profile(t, T);
  const double s = std::sin(g1);
  const double xi = (t >= T / 2.0) ? 1.0 : 0.0;
  return -theta_g * xi + chi0 * (4.0 / 3.0) * s * s * s;
}

double GeometricPath::gamma1(double t) const {
  check_time(t, T, "gamma1");
  return gamma1_fn(t);
}

double GeometricPath::gamma1_dot(double t) const {
  check_time(t, T, "gamma1_dot");
  return gamma1_dot_fn(t);
}

double GeometricPath::gamma2(double t) const {
  check_time(t, T, "gamma2");
  const double xi = (t >= T / 2.0) ? 1.0 : 0.0;
  return -theta_g * xi + gamma2_smooth_fn(t);
}

std::pair<double, double> GeometricPath::control_fields(double t) const {
  check_time(t, T, "control_fields");
  const double g1d = gamma1_dot_fn(t);
  const double g2 = gamma2(t);
  // gamma2_dot tan(gamma1) = (gamma2_dot / cos g1) sin g1, finite everywhere.
  const double tan_term = gamma2_dot_over_cos_fn(t) * std::sin(gamma1_fn(t));
  // Normalized so that i dI/dt = [H_e, I] holds exactly for
  // H_e = (Ox sx + Oy sy)/2; a halved pair precesses the invariant axis at
  // half the required rate and the cyclic condition fails.
  const double ox = -(g1d * std::cos(g2) - tan_term * std::sin(g2));
  const double oy = g1d * std::sin(g2) + tan_term * std::cos(g2);
  return {ox, oy};
}

Complex GeometricPath::omega0(double t) const {
  auto [ox, oy] = control_fields(t);
  return Complex(ox, oy) / 2.0;
}

std::vector<double> GeometricPath::sample_times() const {
  std::vector<double> ts(sample_count);
  for (int i = 0; i < sample_count; ++i)
    ts[i] = T * double(i) / double(sample_count - 1);
  return ts;
}

GeometricPath make_designed_path(double T, double theta_g, double chi0,
                                 int sample_count) {
  if (T <= 0) throw std::invalid_argument("make_designed_path: T must be > 0");
  GeometricPath p;
  p.T = T;
  p.theta_g = theta_g;
  p.chi0 = chi0;
  p.sample_count = sample_count;
  p.gamma1_fn = [T](double t) { return gamma1_profile(t, T); };
  p.gamma1_dot_fn = [T](double t) {
    return kPi * kPi / T * std::sin(2.0 * kPi * t / T);
  };
  p.gamma2_smooth_fn = [T, chi0](double t) {
    const double s = std::sin(gamma1_profile(t, T));
    return chi0 * (4.0 / 3.0) * s * s * s;
  };
  // d/dt [chi0 (4/3) sin^3 g1] / cos g1 = 4 chi0 g1_dot sin^2 g1
  p.gamma2_dot_over_cos_fn = [T, chi0](double t) {
    const double s = std::sin(gamma1_profile(t, T));
    const double g1dot = kPi * kPi / T * std::sin(2.0 * kPi * t / T);
    return 4.0 * chi0 * g1dot * s * s;
  };
  return p;
}

GeometricPath make_step_only_path(double T, double theta_g, int sample_count) {
  GeometricPath p = make_designed_path(T, theta_g, 1.0, sample_count);
  p.chi0 = 0.0;
  p.gamma2_smooth_fn = [](double) { return 0.0; };
  p.gamma2_dot_over_cos_fn = [](double) { return 0.0; };
  return p;
}

GeometricPath make_sine_poly_path(double T, double theta_g,
                                  const std::vector<double>& coeffs,
                                  int sample_count) {
  GeometricPath p = make_designed_path(T, theta_g, 1.0, sample_count);
  p.chi0 = 0.0;
  p.gamma2_smooth_fn = [T, coeffs](double t) {
    const double s = std::sin(gamma1_profile(t, T));
    double acc = 0.0, pw = 1.0;
    for (double c : coeffs) {
      pw *= s;
      acc += c * pw;
    }
    return acc;
  };
  // d/dt sum_k c_k sin^k g1 = [sum_k k c_k sin^{k-1} g1] cos g1 g1_dot
  p.gamma2_dot_over_cos_fn = [T, coeffs](double t) {
    const double s = std::sin(gamma1_profile(t, T));
    const double g1dot = kPi * kPi / T * std::sin(2.0 * kPi * t / T);
    double acc = 0.0, pw = 1.0;
    for (size_t k = 0; k < coeffs.size(); ++k) {
      acc += double(k + 1) * coeffs[k] * pw;
      pw *= s;
    }
    return acc * g1dot;
  };
  return p;
}

namespace {

// Integrands for the "-" branch phases. The dynamic-phase integrand uses the
// singularity-free over-cos form.
double theta_d_rate(const GeometricPath& p, double t) {
  const double s = std::sin(p.gamma1_fn(t));
  return p.gamma2_dot_over_cos_fn(t) * s * s / 2.0;
}

double theta_g_rate(const GeometricPath& p, double t) {
  const double g1 = p.gamma1_fn(t);
  const double sh = std::sin(g1 / 2.0);
  const double g2dot = p.gamma2_dot_over_cos_fn(t) * std::cos(g1);
  return -g2dot * sh * sh;
}

// Step contributions at T/2 from the -Theta_g jump in gamma2.
void step_jumps(const GeometricPath& p, double* jump_d, double* jump_g) {
  const double g1_mid = p.gamma1_fn(p.T / 2.0);
  const double s = std::sin(g1_mid);
  const double c = std::cos(g1_mid);
  const double sh = std::sin(g1_mid / 2.0);
  *jump_d = -p.theta_g * s * s / (2.0 * c);
  *jump_g = p.theta_g * sh * sh;
}

}  // namespace

PhaseRecord lr_phases(const GeometricPath& path, double t, double tol) {
  check_time(t, path.T, "lr_phases");
  const double mid = path.T / 2.0;
  auto fd = [&](double u) { return theta_d_rate(path, u); };
  auto fg = [&](double u) { return theta_g_rate(path, u); };

  PhaseRecord rec;
  rec.t = t;
  rec.theta_d_minus = integrate_checked(fd, 0.0, std::min(t, mid), tol, "lr_phases");
  rec.theta_g_minus = integrate_checked(fg, 0.0, std::min(t, mid), tol, "lr_phases");
  if (t >= mid) {
    double jd = 0.0, jg = 0.0;
    step_jumps(path, &jd, &jg);
    rec.theta_d_minus += jd + integrate_checked(fd, mid, t, tol, "lr_phases");
    rec.theta_g_minus += jg + integrate_checked(fg, mid, t, tol, "lr_phases");
  }
  rec.mu_minus = rec.theta_d_minus + rec.theta_g_minus;
  return rec;
}

std::vector<PhaseRecord> lr_phase_table(const GeometricPath& path, int points,
                                        double tol) {
  if (points < 2) throw std::invalid_argument("lr_phase_table: points < 2");
  std::vector<PhaseRecord> out(points);
  const double mid = path.T / 2.0;
  double jd = 0.0, jg = 0.0;
  step_jumps(path, &jd, &jg);
  auto fd = [&](double u) { return theta_d_rate(path, u); };
  auto fg = [&](double u) { return theta_g_rate(path, u); };

  double acc_d = 0.0, acc_g = 0.0, prev = 0.0;
  bool jumped = false;
  const double panel_tol = tol / points;
  for (int i = 0; i < points; ++i) {
    const double t = path.T * double(i) / double(points - 1);
    if (!jumped && t >= mid) {
      acc_d += integrate_checked(fd, prev, mid, panel_tol, "lr_phase_table") + jd;
      acc_g += integrate_checked(fg, prev, mid, panel_tol, "lr_phase_table") + jg;
      prev = mid;
      jumped = true;
    }
    acc_d += integrate_checked(fd, prev, t, panel_tol, "lr_phase_table");
    acc_g += integrate_checked(fg, prev, t, panel_tol, "lr_phase_table");
    prev = t;
    out[i] = {t, acc_d, acc_g, acc_d + acc_g};
  }
  return out;
}

Mat effective_sigma_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Mat effective_sigma_y() {
  Mat m(2, 2);
  m << 0, Complex(0, 1), Complex(0, -1), 0;
  return m;
}

Mat effective_sigma_z() {
  Mat m(2, 2);
  m << -1, 0, 0, 1;
  return m;
}

ComplexOperator invariant_op(double gamma1, double gamma2) {
  const double s1 = std::sin(gamma1), c1 = std::cos(gamma1);
  const double s2 = std::sin(gamma2), c2 = std::cos(gamma2);
  Mat m = s1 * s2 * effective_sigma_x() + s1 * c2 * effective_sigma_y() +
          c1 * effective_sigma_z();
  return {std::move(m), BasisTag::effective2()};
}

Vec invariant_eigvec_plus(double gamma1, double gamma2) {
  Vec v(2);
  const Complex i(0, 1);
  v(0) = i * std::exp(Complex(0, -gamma2)) * std::sin(gamma1 / 2.0);
  v(1) = std::cos(gamma1 / 2.0);
  return v;
}

Vec invariant_eigvec_minus(double gamma1, double gamma2) {
  Vec v(2);
  const Complex i(0, 1);
  v(0) = std::cos(gamma1 / 2.0);
  v(1) = i * std::exp(Complex(0, gamma2)) * std::sin(gamma1 / 2.0);
  return v;
}

namespace {

// Smooth cumulative mu_-(t) on a uniform grid with Hermite interpolation;
// the T/2 jump is added analytically on evaluation.
struct PhaseInterpolant {
  double T = 0.0;
  double dt = 0.0;
  double jump = 0.0;  // jump_d + jump_g at T/2
  std::vector<double> mu;      // smooth part at nodes
  std::vector<double> mu_dot;  // analytic derivative at nodes

  double operator()(double t) const {
    const int n = int(mu.size()) - 1;
    double x = t / dt;
    int i = std::min(int(x), n - 1);
    const double u = x - i;
    const double h = dt;
    const double m0 = mu[i], m1 = mu[i + 1];
    const double d0 = mu_dot[i], d1 = mu_dot[i + 1];
    const double u2 = u * u, u3 = u2 * u;
    double val = (2 * u3 - 3 * u2 + 1) * m0 + (u3 - 2 * u2 + u) * h * d0 +
                 (-2 * u3 + 3 * u2) * m1 + (u3 - u2) * h * d1;
    if (t >= T / 2.0) val += jump;
    return val;
  }
};

PhaseInterpolant build_mu_interpolant(const GeometricPath& path, int nodes) {
  PhaseInterpolant ip;
  ip.T = path.T;
  ip.dt = path.T / double(nodes - 1);
  double jd = 0.0, jg = 0.0;
  step_jumps(path, &jd, &jg);
  ip.jump = jd + jg;
  ip.mu.resize(nodes);
  ip.mu_dot.resize(nodes);
  auto rate = [&](double u) {
    return theta_d_rate(path, u) + theta_g_rate(path, u);
  };
  double acc = 0.0;
  ip.mu[0] = 0.0;
  ip.mu_dot[0] = rate(0.0);
  for (int i = 1; i < nodes; ++i) {
    const double a = ip.dt * (i - 1), b = ip.dt * i;
    acc += gk15::integrate(rate, a, b, 3, 1e-14);
    ip.mu[i] = acc;
    ip.mu_dot[i] = rate(b);
  }
  return ip;
}

}  // namespace

double sensitivity_Qg(const GeometricPath& path, double tol) {
  const int nodes = std::max(path.sample_count, 2001);
  const PhaseInterpolant mu = build_mu_interpolant(path, nodes);
  auto integrand = [&](double t, int re) {
    const double chi = path.gamma2(t) + 2.0 * mu(t);
    const double s = std::sin(path.gamma1_fn(t));
    const double w = path.gamma1_dot_fn(t) * s * s;
    return re ? w * std::cos(chi) : w * std::sin(chi);
  };
  auto f_re = [&](double t) { return integrand(t, 1); };
  auto f_im = [&](double t) { return integrand(t, 0); };
  const double mid = path.T / 2.0;
  const double re = integrate_checked(f_re, 0.0, mid, tol, "sensitivity_Qg") +
                    integrate_checked(f_re, mid, path.T, tol, "sensitivity_Qg");
  const double im = integrate_checked(f_im, 0.0, mid, tol, "sensitivity_Qg") +
                    integrate_checked(f_im, mid, path.T, tol, "sensitivity_Qg");
  return re * re + im * im;
}

Mat gate_unitary(double theta, double theta_g) {
  const Vec plus = dressed_plus(theta);
  const Vec minus = dressed_minus(theta);
  const Complex phase = std::exp(Complex(0, theta_g));
  return phase * (plus * plus.adjoint()) + minus * minus.adjoint();
}

Mat gate_unitary(const GateSpec& gate) {
  return gate_unitary(gate.theta, gate.theta_g);
}

Vec dressed_plus(double theta) {
  Vec v(2);
  v << std::cos(theta), std::sin(theta);
  return v;
}

Vec dressed_minus(double theta) {
  Vec v(2);
  v << std::sin(theta), -std::cos(theta);
  return v;
}

}  // namespace bingeo
