#include "bingeo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bingeo {

void FidelityTrace::validate_and_clip(double tol) {
  for (double& v : values) {
    if (v < -tol || v > 1.0 + tol)
      throw std::runtime_error("FidelityTrace: value " + std::to_string(v) +
                               " outside [0,1] beyond tolerance");
    v = std::clamp(v, 0.0, 1.0);
  }
}

double average_gate_fidelity(const Mat& m) {
  if (m.rows() != 2 || m.cols() != 2)
    throw std::invalid_argument("average_gate_fidelity: M must be 2x2");
  const double tr_mm = (m.adjoint() * m).trace().real();
  const Complex tr_m = m.trace();
  return (tr_mm + std::norm(tr_m)) / 6.0;
}

double average_gate_fidelity(const Mat& u_cols, const Mat& logical_basis,
                             const Mat& target) {
  if (u_cols.rows() != logical_basis.rows() || u_cols.cols() != 2 ||
      logical_basis.cols() != 2 || target.rows() != 2 || target.cols() != 2)
    throw std::invalid_argument("average_gate_fidelity: dimension mismatch");
  const Mat m = target.adjoint() * (logical_basis.adjoint() * u_cols);
  return average_gate_fidelity(m);
}

std::array<GateSpec, 3> target_gates() {
  return {make_gate(GateName::pi_phase), make_gate(GateName::not_gate),
          make_gate(GateName::hadamard)};
}

double state_fidelity(const Mat& rho, const Vec& target) {
  if (rho.rows() != rho.cols() || rho.rows() != target.size())
    throw std::invalid_argument("state_fidelity: dimension mismatch");
  if ((rho - rho.adjoint()).norm() > 1e-8 * std::max(1.0, rho.norm()))
    throw std::invalid_argument("state_fidelity: rho is not Hermitian");
  const Complex val = (target.adjoint() * rho * target)(0, 0);
  if (std::abs(val.imag()) > 1e-12)
    throw std::runtime_error("state_fidelity: expectation not real");
  return val.real();
}

namespace {

struct Residuals {
  double rms(const std::vector<double>& r, const std::vector<double>& f,
             double a, double b, double c) const {
    double acc = 0.0;
    for (size_t i = 0; i < r.size(); ++i) {
      const double e = a * std::exp(-b * r[i]) + c - f[i];
      acc += e * e;
    }
    return std::sqrt(acc / double(r.size()));
  }
};

}  // namespace

ExpFit fit_exponential(const std::vector<double>& r,
                       const std::vector<double>& f) {
  if (r.size() != f.size() || r.size() < 4)
    throw std::invalid_argument("fit_exponential: need >= 4 points");
  for (size_t i = 1; i < r.size(); ++i)
    for (size_t j = 0; j < i; ++j)
      if (r[i] == r[j])
        throw std::invalid_argument("fit_exponential: duplicate R values");

  const int n = int(r.size());
  const double f_mean = std::accumulate(f.begin(), f.end(), 0.0) / n;
  double f_spread = 0.0;
  for (double v : f) f_spread = std::max(f_spread, std::abs(v - f_mean));

  ExpFit fit;
  if (f_spread < 1e-12 * std::max(1.0, std::abs(f_mean))) {
    // Constant data: amplitude and rate cannot be separated.
    fit.a = 0.0;
    fit.b = 0.0;
    fit.c = f_mean;
    fit.b_identifiable = false;
    fit.converged = true;
    fit.rms_residual = Residuals{}.rms(r, f, fit.a, fit.b, fit.c);
    return fit;
  }

  // Log-linearization seed: assume a saturating curve, c slightly beyond the
  // extremal value, then log(|c - F|) is linear in R.
  const auto [fmin_it, fmax_it] = std::minmax_element(f.begin(), f.end());
  const size_t i_rmax =
      std::distance(r.begin(), std::max_element(r.begin(), r.end()));
  const bool rising = f[i_rmax] >= f_mean;
  double c0 = rising ? *fmax_it + 0.1 * f_spread : *fmin_it - 0.1 * f_spread;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double y = std::log(std::max(std::abs(c0 - f[i]), 1e-300));
    sx += r[i];
    sy += y;
    sxx += r[i] * r[i];
    sxy += r[i] * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double b = std::max(1e-6, -slope);
  double a = (rising ? -1.0 : 1.0) * std::exp((sy + b * sx) / n);
  double c = c0;

  // Levenberg-Marquardt on (a, b, c).
  Residuals res;
  double lambda = 1e-3;
  double cost = res.rms(r, f, a, b, c);
  fit.converged = false;
  int it = 0;
  for (; it < 200; ++it) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (int i = 0; i < n; ++i) {
      const double e = std::exp(-b * r[i]);
      const double resid = a * e + c - f[i];
      Eigen::Vector3d jac(e, -a * r[i] * e, 1.0);
      jtj += jac * jac.transpose();
      jtr += jac * resid;
    }
    Eigen::Matrix3d damped = jtj;
    damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
    const Eigen::Vector3d step = damped.ldlt().solve(-jtr);
    const double a1 = a + step(0), b1 = b + step(1), c1 = c + step(2);
    const double cost1 = res.rms(r, f, a1, b1, c1);
    if (cost1 < cost) {
      a = a1;
      b = b1;
      c = c1;
      lambda = std::max(lambda * 0.3, 1e-12);
      if (std::abs(cost - cost1) < 1e-15 + 1e-12 * cost) {
        cost = cost1;
        fit.converged = true;
        break;
      }
      cost = cost1;
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }
  }
  fit.a = a;
  fit.b = b;
  fit.c = c;
  fit.rms_residual = cost;
  fit.iterations = it;
  if (!fit.converged) fit.converged = cost < 1e-10;
  // A decay rate pushed to the boundary or a vanishing amplitude means the
  // exponential term is not resolved by the data.
  fit.b_identifiable = std::abs(a) > 1e-9 * std::max(1.0, std::abs(f_mean)) &&
                       b > 1e-5 && b < 1e3;
  return fit;
}

}  // namespace bingeo
