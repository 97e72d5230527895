#include "bingeo/evolve.hpp"

#include "bingeo/rng.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace bingeo {

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::rk4_fixed: return "rk4_fixed";
    case Scheme::dp54_adaptive: return "dp54_adaptive";
    case Scheme::magnus2: return "magnus2";
    case Scheme::magnus4: return "magnus4";
    case Scheme::split_static: return "split_static";
  }
  return "?";
}

HamiltonianModel model_from_full(const FullModel& fm) {
  HamiltonianModel m;
  m.basis = BasisTag::joint(fm.params.n_max);
  m.fastest_scale = std::abs(fm.params.Delta);
  m.static_part = fm.h_static;
  m.drive_op = fm.ge_op;
  DriveSpec spec = fm.spec;
  m.drive_scalar = [spec](double t) { return spec.ge_drive(t); };
  FullModel fm_copy = fm;
  m.eval = [fm_copy](double t) { return fm_copy.hamiltonian(t); };
  return m;
}

HamiltonianModel model_from_effective(std::function<Complex(double)> omega0) {
  HamiltonianModel m;
  m.basis = BasisTag::effective3();
  m.fastest_scale = 0.0;
  m.eval = [omega0](double t) {
    Mat h = Mat::Zero(3, 3);
    const Complex o = omega0(t);
    h(0, 2) = o;
    h(2, 0) = std::conj(o);
    return h;
  };
  return m;
}

HamiltonianModel model_from_function(std::function<Mat(double)> eval,
                                     BasisTag basis, double fastest_scale) {
  HamiltonianModel m;
  m.basis = basis;
  m.fastest_scale = fastest_scale;
  m.eval = std::move(eval);
  return m;
}

namespace {

constexpr Complex kI{0.0, 1.0};

// ---------------------------------------------------------------------
// Closed-system steppers acting on a column block.
// ---------------------------------------------------------------------

void rk4_step(const HamiltonianModel& m, double t, double h, Mat& y) {
  const Mat k1 = -kI * (m.eval(t) * y);
  const Mat k2 = -kI * (m.eval(t + h / 2) * (y + (h / 2) * k1));
  const Mat k3 = -kI * (m.eval(t + h / 2) * (y + (h / 2) * k2));
  const Mat k4 = -kI * (m.eval(t + h) * (y + h * k3));
  y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void magnus2_step(const HamiltonianModel& m, double t, double h, Mat& y) {
  const Mat u = ((-kI * h) * m.eval(t + h / 2)).exp();
  y = u * y;
}

void magnus4_step(const HamiltonianModel& m, double t, double h, Mat& y) {
  static const double c1 = 0.5 - std::sqrt(3.0) / 6.0;
  static const double c2 = 0.5 + std::sqrt(3.0) / 6.0;
  const Mat h1 = m.eval(t + c1 * h);
  const Mat h2 = m.eval(t + c2 * h);
  Mat omega = (-kI * h / 2.0) * (h1 + h2);
  omega.noalias() += (std::sqrt(3.0) * h * h / 12.0) * (h1 * h2 - h2 * h1);
  y = omega.exp() * y;
}

// Rotation exp(-ih (f B + conj(f) B^dag)) applied in place; B = |g><e| x I.
void apply_ge_rotation(Mat& y, Complex f, double h, int nc) {
  const double af = std::abs(f);
  if (af == 0.0) return;
  const double c = std::cos(af * h), s = std::sin(af * h);
  const Complex u = f / af;
  for (int col = 0; col < y.cols(); ++col) {
    for (int n = 0; n < nc; ++n) {
      const Complex xg = y(kG * nc + n, col);
      const Complex xe = y(kE * nc + n, col);
      y(kG * nc + n, col) = c * xg - kI * s * u * xe;
      y(kE * nc + n, col) = c * xe - kI * s * std::conj(u) * xg;
    }
  }
}

struct SplitCtx {
  Mat half;  // exp(-i h/2 H_static)
  Mat full;  // half * half
  int nc = 0;
};

SplitCtx make_split_ctx(const HamiltonianModel& m, double h) {
  if (!m.has_split())
    throw std::invalid_argument("split_static scheme needs the split structure");
  SplitCtx ctx;
  ctx.half = ((-kI * h / 2.0) * (*m.static_part)).exp();
  ctx.full = ctx.half * ctx.half;
  ctx.nc = int(m.static_part->rows()) / 3;
  return ctx;
}

// ---------------------------------------------------------------------
// Dormand-Prince 5(4), used where an adaptive reference is wanted.
// ---------------------------------------------------------------------

struct Dp54Result {
  Mat y;
  double t;
};

Dp54Result dp54_integrate(const HamiltonianModel& m, Mat y, double t0,
                          double t1, double rel_tol, double abs_tol) {
  auto rhs = [&](double t, const Mat& v) -> Mat { return -kI * (m.eval(t) * v); };
  const double span = t1 - t0;
  double h = span / 100.0;
  double t = t0;
  Mat k1 = rhs(t, y);
  int rejected_in_a_row = 0;
  while (t < t1) {
    if (t + h > t1) h = t1 - t;
    const Mat k2 = rhs(t + h / 5.0, y + h * (1.0 / 5.0) * k1);
    const Mat k3 = rhs(t + 3.0 * h / 10.0, y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
    const Mat k4 = rhs(t + 4.0 * h / 5.0,
                       y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
    const Mat k5 = rhs(t + 8.0 * h / 9.0,
                       y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                                64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
    const Mat k6 = rhs(t + h,
                       y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                                46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                                5103.0 / 18656.0 * k5));
    const Mat y5 = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 +
                            125.0 / 192.0 * k4 - 2187.0 / 6784.0 * k5 +
                            11.0 / 84.0 * k6);
    const Mat k7 = rhs(t + h, y5);
    const Mat y4 = y + h * (5179.0 / 57600.0 * k1 + 7571.0 / 16695.0 * k3 +
                            393.0 / 640.0 * k4 - 92097.0 / 339200.0 * k5 +
                            187.0 / 2100.0 * k6 + 1.0 / 40.0 * k7);
    const double scale = abs_tol + rel_tol * std::max(y.norm(), y5.norm());
    const double err = (y5 - y4).norm() / scale;
    if (err <= 1.0) {
      t += h;
      y = y5;
      k1 = k7;  // FSAL
      rejected_in_a_row = 0;
    } else if (++rejected_in_a_row > 60) {
      throw std::runtime_error(
          "dp54_adaptive: tolerance failure, error ratio " + std::to_string(err));
    }
    const double fac =
        std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
    h *= fac;
    if (h < span * 1e-13)
      throw std::runtime_error("dp54_adaptive: step size underflow");
  }
  return {std::move(y), t};
}

// Checkpoint bookkeeping shared by the fixed-step drivers.
struct CheckpointPlan {
  std::vector<int> at_step;  // strictly increasing, first 0, last = steps
};

CheckpointPlan plan_checkpoints(int steps, int checkpoints) {
  CheckpointPlan plan;
  checkpoints = std::max(checkpoints, 2);
  plan.at_step.reserve(checkpoints);
  int prev = -1;
  for (int j = 0; j < checkpoints; ++j) {
    int s = int(std::llround(double(j) * steps / double(checkpoints - 1)));
    if (s <= prev) s = prev + 1;
    if (s > steps) break;
    plan.at_step.push_back(s);
    prev = s;
  }
  if (plan.at_step.front() != 0) plan.at_step.insert(plan.at_step.begin(), 0);
  if (plan.at_step.back() != steps) plan.at_step.push_back(steps);
  return plan;
}

}  // namespace

Trajectory propagate_columns(const HamiltonianModel& model, const Mat& cols0,
                             const TimeGrid& grid, int checkpoints) {
  if (grid.steps < 1) throw std::invalid_argument("TimeGrid: steps must be >= 1");
  const double span = grid.t1 - grid.t0;
  const double h = span / grid.steps;
  if (grid.scheme == Scheme::rk4_fixed && model.fastest_scale > 0.0 &&
      h > kTwoPi / (50.0 * model.fastest_scale)) {
    std::ostringstream os;
    os << "rk4_fixed: step " << h << " s exceeds 2pi/(50*" << model.fastest_scale
       << ") for this Hamiltonian; raise steps or use magnus4";
    throw std::invalid_argument(os.str());
  }

  Trajectory traj;
  const Mat g0 = cols0.adjoint() * cols0;
  Eigen::RowVectorXd norms0 = cols0.colwise().norm();

  auto record = [&](double t, const Mat& y) {
    traj.times.push_back(t);
    traj.frames.push_back(y);
    for (int c = 0; c < y.cols(); ++c)
      traj.norm_drift =
          std::max(traj.norm_drift, std::abs(y.col(c).norm() - norms0(c)));
    traj.ortho_defect =
        std::max(traj.ortho_defect, (y.adjoint() * y - g0).norm());
  };

  Mat y = cols0;
  record(grid.t0, y);

  if (grid.scheme == Scheme::dp54_adaptive) {
    const CheckpointPlan plan = plan_checkpoints(grid.steps, checkpoints);
    for (size_t j = 1; j < plan.at_step.size(); ++j) {
      const double ta = grid.t0 + span * plan.at_step[j - 1] / grid.steps;
      const double tb = grid.t0 + span * plan.at_step[j] / grid.steps;
      y = dp54_integrate(model, std::move(y), ta, tb, grid.rel_tol, grid.abs_tol).y;
      record(tb, y);
    }
    return traj;
  }

  const CheckpointPlan plan = plan_checkpoints(grid.steps, checkpoints);
  size_t next_cp = 1;

  if (grid.scheme == Scheme::split_static) {
    const SplitCtx ctx = make_split_ctx(model, h);
    y = ctx.half * y;
    for (int k = 0; k < grid.steps; ++k) {
      const double tm = grid.t0 + (k + 0.5) * h;
      apply_ge_rotation(y, model.drive_scalar(tm), h, ctx.nc);
      const bool cp = plan.at_step[next_cp] == k + 1;
      const double tk1 = (k + 1 == grid.steps) ? grid.t1 : grid.t0 + (k + 1) * h;
      if (cp || k + 1 == grid.steps) {
        y = ctx.half * y;
        record(tk1, y);
        if (cp) ++next_cp;
        if (k + 1 < grid.steps) y = ctx.half * y;
      } else {
        y = ctx.full * y;
      }
    }
    return traj;
  }

  for (int k = 0; k < grid.steps; ++k) {
    const double t = grid.t0 + k * h;
    switch (grid.scheme) {
      case Scheme::rk4_fixed: rk4_step(model, t, h, y); break;
      case Scheme::magnus2: magnus2_step(model, t, h, y); break;
      case Scheme::magnus4: magnus4_step(model, t, h, y); break;
      default: throw std::logic_error("unreachable scheme");
    }
    if (plan.at_step[next_cp] == k + 1) {
      const double tk1 = (k + 1 == grid.steps) ? grid.t1 : grid.t0 + (k + 1) * h;
      record(tk1, y);
      ++next_cp;
    }
  }
  return traj;
}

Trajectory propagate_state(const HamiltonianModel& model, const Vec& psi0,
                           const TimeGrid& grid, int checkpoints) {
  Mat cols(psi0.size(), 1);
  cols.col(0) = psi0;
  return propagate_columns(model, cols, grid, checkpoints);
}

void DecoherenceRates::validate() const {
  if (gamma_d < 0 || gamma_s < 0 || gamma_kappa < 0)
    throw std::invalid_argument("DecoherenceRates: rates must be >= 0");
}

std::vector<CollapseOp> collapse_operators(const SystemParams& p,
                                           const DecoherenceRates& rates) {
  rates.validate();
  const int nm = p.n_max;
  ComplexOperator ic = cavity_identity(nm);
  auto embed_q = [&](int to, int from) {
    return tensor_embed(ic, qutrit_transfer(to, from)).mat;
  };
  std::vector<CollapseOp> ops;
  ops.push_back({embed_q(kE, kE), rates.gamma_d, "sigma_ee"});
  ops.push_back({embed_q(kF, kF), rates.gamma_d, "sigma_ff"});
  ops.push_back({embed_q(kG, kF), rates.gamma_s / 2.0, "sigma-_fg"});
  ops.push_back({embed_q(kE, kF), rates.gamma_s / 2.0, "sigma-_fe"});
  ops.push_back({embed_q(kG, kE), rates.gamma_s, "sigma-_eg"});
  ops.push_back(
      {tensor_embed(annihilation_op(nm), qutrit_identity()).mat, rates.gamma_kappa, "a"});
  return ops;
}

namespace {

struct Dissipator {
  std::vector<const CollapseOp*> active;
  Mat sigma;  // sum_j rate_j O_j^dag O_j

  explicit Dissipator(const std::vector<CollapseOp>& ops) {
    for (const auto& o : ops)
      if (o.rate > 0.0) active.push_back(&o);
    if (!active.empty()) {
      const int d = int(active.front()->op.rows());
      sigma = Mat::Zero(d, d);
      for (const auto* o : active)
        sigma.noalias() += o->rate * (o->op.adjoint() * o->op);
    }
  }

  bool empty() const { return active.empty(); }

  Mat apply(const Mat& rho) const {
    Mat out = Mat::Zero(rho.rows(), rho.cols());
    for (const auto* o : active)
      out.noalias() += o->rate * (o->op * rho * o->op.adjoint());
    out.noalias() -= 0.5 * (sigma * rho + rho * sigma);
    return out;
  }
};

}  // namespace

Trajectory lindblad_propagate(const HamiltonianModel& model,
                              const std::vector<CollapseOp>& collapse,
                              const Mat& rho0, const TimeGrid& grid,
                              int checkpoints) {
  const double trace_tol = 1e-6, herm_tol = 1e-8, pos_tol = 1e-8;
  if (std::abs(rho0.trace().real() - 1.0) > trace_tol ||
      std::abs(rho0.trace().imag()) > trace_tol)
    throw std::invalid_argument("lindblad_propagate: rho0 must have unit trace");
  if ((rho0 - rho0.adjoint()).norm() > herm_tol * std::max(1.0, rho0.norm()))
    throw std::invalid_argument("lindblad_propagate: rho0 must be Hermitian");

  const Dissipator diss(collapse);
  const double span = grid.t1 - grid.t0;
  const double h = span / grid.steps;

  Trajectory traj;
  traj.min_eigenvalue = 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> eig;

  auto record = [&](double t, const Mat& rho) {
    traj.times.push_back(t);
    traj.frames.push_back(rho);
    const double tr_err = std::abs(rho.trace().real() - 1.0) +
                          std::abs(rho.trace().imag());
    traj.trace_drift = std::max(traj.trace_drift, tr_err);
    eig.compute(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    traj.min_eigenvalue = std::min(traj.min_eigenvalue, eig.eigenvalues()(0));
    if (tr_err > trace_tol || traj.min_eigenvalue < -pos_tol) {
      std::ostringstream os;
      os << "lindblad_propagate: state left the physical set at t=" << t
         << " (trace error " << tr_err << ", min eigenvalue "
         << traj.min_eigenvalue << ")";
      throw std::runtime_error(os.str());
    }
  };

  // Strang split: half dissipator, unitary step, half dissipator. The
  // dissipator half-step is a second-order Taylor map; each application is
  // exactly trace-preserving.
  auto diss_half = [&](Mat& rho) {
    if (diss.empty()) return;
    const Mat d1 = diss.apply(rho);
    const Mat d2 = diss.apply(d1);
    rho += (h / 2.0) * d1 + (h * h / 8.0) * d2;
  };

  Mat rho = rho0;
  record(grid.t0, rho);
  const CheckpointPlan plan = plan_checkpoints(grid.steps, checkpoints);
  size_t next_cp = 1;

  std::optional<SplitCtx> split;
  if (grid.scheme == Scheme::split_static) split = make_split_ctx(model, h);

  for (int k = 0; k < grid.steps; ++k) {
    const double t = grid.t0 + k * h;
    diss_half(rho);
    Mat u;
    switch (grid.scheme) {
      case Scheme::magnus2:
        u = ((-kI * h) * model.eval(t + h / 2)).exp();
        break;
      case Scheme::magnus4: {
        static const double c1 = 0.5 - std::sqrt(3.0) / 6.0;
        static const double c2 = 0.5 + std::sqrt(3.0) / 6.0;
        const Mat h1 = model.eval(t + c1 * h);
        const Mat h2 = model.eval(t + c2 * h);
        Mat omega = (-kI * h / 2.0) * (h1 + h2);
        omega.noalias() += (std::sqrt(3.0) * h * h / 12.0) * (h1 * h2 - h2 * h1);
        u = omega.exp();
        break;
      }
      case Scheme::split_static: {
        u = split->half;
        Mat rot = Mat::Identity(u.rows(), u.cols());
        apply_ge_rotation(rot, model.drive_scalar(t + h / 2), h, split->nc);
        u = split->half * rot * split->half;
        break;
      }
      default:
        throw std::invalid_argument(
            "lindblad_propagate: use magnus2, magnus4 or split_static");
    }
    rho = u * rho * u.adjoint();
    diss_half(rho);
    if (plan.at_step[next_cp] == k + 1) {
      const double tk1 = (k + 1 == grid.steps) ? grid.t1 : grid.t0 + (k + 1) * h;
      record(tk1, rho);
      ++next_cp;
    }
  }
  return traj;
}

Complex SampledField::omega0(double t) const {
  const int n = int(x.size());
  int i = int(std::floor((t - t0) / dt));
  i = std::clamp(i, 0, n - 1);
  return Complex(x[i], y[i]) / 2.0;
}

double SampledField::mean_square_x() const {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / double(x.size());
}

double SampledField::mean_square_y() const {
  double acc = 0.0;
  for (double v : y) acc += v * v;
  return acc / double(y.size());
}

SampledField sample_fields(const GeometricPath& path) {
  SampledField f;
  f.t0 = 0.0;
  f.dt = path.T / double(path.sample_count - 1);
  f.x.resize(path.sample_count);
  f.y.resize(path.sample_count);
  for (int i = 0; i < path.sample_count; ++i) {
    const double t = std::min(path.T, i * f.dt);
    auto [ox, oy] = path.control_fields(t);
    f.x[i] = ox;
    f.y[i] = oy;
  }
  return f;
}

SampledField with_awgn(const SampledField& field, double snr_db, uint64_t seed) {
  if (field.x.empty()) throw std::invalid_argument("with_awgn: empty sample set");
  const double gain = std::pow(10.0, -snr_db / 10.0);
  const double sx = std::sqrt(field.mean_square_x() * gain);
  const double sy = std::sqrt(field.mean_square_y() * gain);
  SampledField out = field;
  for (size_t i = 0; i < out.x.size(); ++i) {
    out.x[i] += sx * rng::normal(seed, 0, i);
    out.y[i] += sy * rng::normal(seed, 1, i);
  }
  return out;
}

DriveSpec with_systematic_error(const DriveSpec& spec, double epsilon) {
  DriveSpec out = spec;
  out.scale = spec.scale * (1.0 + epsilon);
  return out;
}

void parallel_for(int n, const std::function<void(int)>& fn, int num_threads) {
  if (n <= 0) return;
  int workers = num_threads > 0 ? num_threads
                                : int(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace bingeo
