#include "bingeo/experiment.hpp"

#include "bingeo/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace bingeo {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "bingeo 0.1.0";
constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kConvergenceTol = 1e-4;

// Stream ids for the counter-based RNG; run seeds are derived from
// (config seed, stream, index) so every sweep point is replayable on its own.
constexpr uint64_t kStreamAwgnSamples = 7001;
constexpr uint64_t kStreamAwgnSweep = 7002;

Mat effective_logical_basis(double theta) {
  Mat l(3, 2);
  const double c = std::cos(theta), s = std::sin(theta);
  l << c, s, s, -c, 0, 0;
  return l;
}

}  // namespace

Experiment experiment_from_string(const std::string& name) {
  if (name == "fields" || name == "fig2") return Experiment::fields;
  if (name == "gates-effective" || name == "gates_effective" || name == "fig3a")
    return Experiment::gates_effective;
  if (name == "gates-full" || name == "gates_full" || name == "fig3b")
    return Experiment::gates_full;
  if (name == "systematic" || name == "fig4") return Experiment::systematic;
  if (name == "awgn-samples" || name == "awgn_samples" || name == "fig5a")
    return Experiment::awgn_samples;
  if (name == "awgn-sweep" || name == "awgn_sweep" || name == "fig5b")
    return Experiment::awgn_sweep;
  if (name == "decoherence" || name == "fig6") return Experiment::decoherence;
  if (name == "phases") return Experiment::phases;
  if (name == "all") return Experiment::all;
  throw std::invalid_argument("unknown experiment: " + name);
}

std::string experiment_name(Experiment e) {
  switch (e) {
    case Experiment::fields: return "fields";
    case Experiment::gates_effective: return "gates_effective";
    case Experiment::gates_full: return "gates_full";
    case Experiment::systematic: return "systematic";
    case Experiment::awgn_samples: return "awgn_samples";
    case Experiment::awgn_sweep: return "awgn_sweep";
    case Experiment::decoherence: return "decoherence";
    case Experiment::phases: return "phases";
    case Experiment::all: return "all";
  }
  return "?";
}

void ExperimentConfig::resolve_gate() {
  if (gate != GateName::custom) {
    const GateSpec g = make_gate(gate);
    theta = g.theta;
    theta_g = g.theta_g;
  }
}

void ExperimentConfig::apply_fast_tier() {
  epsilon_points = 11;
  seeds_per_point = 10;
  rate_points = 6;
  checkpoints = std::min(checkpoints, 100);
}

ExperimentConfig ExperimentConfig::from_file(const std::string& file) {
  const auto kv = read_kv_file(file);
  const ParamFile pf = params_from_kv(kv);
  ExperimentConfig cfg;
  cfg.params = pf.params;
  cfg.gate = pf.gate;
  cfg.theta = pf.theta;
  cfg.theta_g = pf.theta_g;
  cfg.chi0 = pf.chi0;
  if (pf.theta != make_gate(pf.gate).theta ||
      pf.theta_g != make_gate(pf.gate).theta_g)
    cfg.gate = GateName::custom;

  auto get = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (auto* v = get("experiment")) cfg.experiment = experiment_from_string(*v);
  if (auto* v = get("model")) cfg.model = *v;
  if (auto* v = get("seed")) cfg.seed = std::stoull(*v);
  if (auto* v = get("samples")) cfg.seeds_per_point = std::stoi(*v);
  if (auto* v = get("snr_db")) cfg.snr_db = std::stod(*v);
  if (auto* v = get("epsilon_points")) cfg.epsilon_points = std::stoi(*v);
  if (auto* v = get("rate_points")) cfg.rate_points = std::stoi(*v);
  if (auto* v = get("steps_full")) cfg.steps_full = std::stoi(*v);
  if (auto* v = get("steps_effective")) cfg.steps_effective = std::stoi(*v);
  if (auto* v = get("checkpoints")) cfg.checkpoints = std::stoi(*v);
  if (auto* v = get("fock_cutoff")) cfg.fock_cutoff = std::stoi(*v);
  if (auto* v = get("output_dir")) cfg.output_dir = *v;
  if (auto* v = get("fast")) cfg.fast = (*v == "1" || *v == "true");
  if (auto* v = get("rates_angular")) cfg.rates_angular = (*v == "1" || *v == "true");
  cfg.resolve_gate();
  return cfg;
}

RunContext make_run_context(const SystemParams& p, const GateSpec& gate,
                            double chi0) {
  RunContext ctx;
  ctx.params = p;
  ctx.gate = gate;
  ctx.path = make_designed_path(p.T, gate.theta_g, chi0);
  ctx.basis = make_displaced_basis(p.alpha0, p.n_max);
  ctx.spec = derive_drive_spec(p, gate, ctx.path, ctx.basis);
  return ctx;
}

GateRun run_effective_gate(const GateSpec& gate, const GeometricPath& path,
                           const std::function<Complex(double)>& omega0,
                           double scale, int steps, int checkpoints,
                           Scheme scheme) {
  std::function<Complex(double)> env;
  if (omega0) {
    env = omega0;
  } else {
    GeometricPath pc = path;
    env = [pc](double t) { return pc.omega0(t); };
  }
  if (scale != 1.0) {
    auto base = env;
    env = [base, scale](double t) { return scale * base(t); };
  }
  const HamiltonianModel model = model_from_effective(env);
  const Mat l = effective_logical_basis(gate.theta);
  TimeGrid grid{0.0, path.T, steps, scheme};
  const Trajectory traj = propagate_columns(model, l, grid, checkpoints);

  GateRun out;
  for (size_t i = 0; i < traj.times.size(); ++i) {
    out.trace.times.push_back(traj.times[i]);
    out.trace.values.push_back(
        average_gate_fidelity(traj.frames[i], l, gate.target_unitary));
  }
  out.trace.validate_and_clip();
  out.final_fidelity = out.trace.values.back();
  return out;
}

GateRun run_full_gate(const RunContext& ctx, int steps, int checkpoints,
                      Scheme scheme) {
  const FullModel full = make_full_model(ctx.params, ctx.spec);
  const HamiltonianModel model = model_from_full(full);
  const EffectiveEmbedding embed =
      make_effective_embedding(ctx.params, ctx.gate, ctx.basis);
  TimeGrid grid{0.0, ctx.params.T, steps, scheme};
  const Trajectory traj =
      propagate_columns(model, embed.logical_cols, grid, checkpoints);

  GateRun out;
  for (size_t i = 0; i < traj.times.size(); ++i) {
    const Mat corr =
        frame_correction(ctx.params, ctx.spec, ctx.basis, traj.times[i]);
    out.trace.times.push_back(traj.times[i]);
    out.trace.values.push_back(average_gate_fidelity(
        corr * traj.frames[i], embed.logical_cols, ctx.gate.target_unitary));
  }
  out.trace.validate_and_clip();
  out.final_fidelity = out.trace.values.back();
  return out;
}

double run_decoherence_point(const RunContext& ctx,
                             const DecoherenceRates& rates, int steps,
                             Scheme scheme) {
  const FullModel full = make_full_model(ctx.params, ctx.spec);
  const HamiltonianModel model = model_from_full(full);
  const EffectiveEmbedding embed =
      make_effective_embedding(ctx.params, ctx.gate, ctx.basis);
  const Vec psi0 = embed.logical_cols.col(0);
  const Mat rho0 = psi0 * psi0.adjoint();
  const auto collapse = collapse_operators(ctx.params, rates);
  TimeGrid grid{0.0, ctx.params.T, steps, scheme};
  const Trajectory traj = lindblad_propagate(model, collapse, rho0, grid, 2);
  const Mat corr =
      frame_correction(ctx.params, ctx.spec, ctx.basis, ctx.params.T);
  const Vec target = corr.adjoint() * embed.logical_cols.col(1);
  return state_fidelity(traj.final_frame(), target);
}

// ----------------------------------------------------------------------
// run_experiment
// ----------------------------------------------------------------------

namespace {

struct Emitter {
  const ExperimentConfig& cfg;
  SimResult& result;

  std::string dir_file(const std::string& name) const {
    return (fs::path(cfg.output_dir) / name).string();
  }
  void csv(const Table& t, const std::string& name) {
    const std::string p = dir_file(name);
    emit_csv(t, p);
    result.files.push_back(p);
  }
  void plot(const Table& t, PlotStyle style, const std::string& name) {
    if (!cfg.emit_plots) return;
    const std::string p = dir_file(name);
    emit_plot(t, style, p);
    result.files.push_back(p);
  }
};

json drive_summary(const RunContext& ctx) {
  json j;
  j["omega_tilde_rad_s"] = ctx.spec.omega_tilde;
  j["Omega_rad_s"] = ctx.spec.Omega;
  j["Delta_p_rad_s"] = {ctx.spec.Delta_p[0], ctx.spec.Delta_p[1],
                        ctx.spec.Delta_p[2]};
  j["beta_2k_0"] = {ctx.spec.beta[0], ctx.spec.beta[1], ctx.spec.beta[2]};
  j["bright_coeff"] = {ctx.spec.bright_coeff[0], ctx.spec.bright_coeff[1],
                       ctx.spec.bright_coeff[2]};
  return j;
}

json regime_to_json(const RegimeReport& r) {
  json j;
  j["pass"] = r.pass;
  j["varsigma"] = r.varsigma;
  j["worst_factor"] = r.worst_factor;
  json entries = json::array();
  for (const auto& e : r.ratios)
    entries.push_back({{"name", e.name},
                       {"ratio", e.ratio},
                       {"tier", e.tier},
                       {"within", e.within}});
  j["ratios"] = entries;
  return j;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = (n == 1) ? a : a + (b - a) * double(i) / double(n - 1);
  return v;
}

double mean_of(const std::vector<double>& v) {
  double acc = 0;
  for (double x : v) acc += x;
  return acc / double(v.size());
}

double stddev_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double acc = 0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / double(v.size()));
}

}  // namespace

SimResult run_experiment(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  cfg.resolve_gate();
  if (cfg.fast) cfg.apply_fast_tier();

  SimResult result;
  if (cfg.experiment == Experiment::all) {
    for (Experiment e :
         {Experiment::fields, Experiment::phases, Experiment::gates_effective,
          Experiment::gates_full, Experiment::systematic,
          Experiment::awgn_samples, Experiment::awgn_sweep,
          Experiment::decoherence}) {
      ExperimentConfig sub = cfg;
      sub.experiment = e;
      SimResult r = run_experiment(sub);
      result.files.insert(result.files.end(), r.files.begin(), r.files.end());
      if (r.exit_code != 0) {
        result.exit_code = r.exit_code;
        result.message = r.message;
        return result;
      }
    }
    result.message = "all experiments completed";
    return result;
  }

  try {
    fs::create_directories(cfg.output_dir);
  } catch (const std::exception& e) {
    result.exit_code = 4;
    result.message = std::string("cannot create output dir: ") + e.what();
    return result;
  }

  const bool density = cfg.experiment == Experiment::decoherence;
  SystemParams p = cfg.params;
  p.n_max = cfg.fock_cutoff > 0 ? cfg.fock_cutoff : (density ? 12 : 20);

  const GateSpec gate = (cfg.gate == GateName::custom)
                            ? custom_gate(cfg.theta, cfg.theta_g)
                            : make_gate(cfg.gate);

  json manifest;
  manifest["version"] = kVersion;
  manifest["experiment"] = experiment_name(cfg.experiment);
  manifest["seed"] = cfg.seed;
  manifest["gate"] = gate.label();
  manifest["theta"] = gate.theta;
  manifest["theta_g"] = gate.theta_g;
  manifest["chi0"] = cfg.chi0;
  manifest["fast"] = cfg.fast;
  manifest["model"] = cfg.model;
  manifest["params"] = {
      {"lambda_rad_s", p.lambda},   {"Delta_rad_s", p.Delta},
      {"delta_rad_s", p.delta},     {"alpha0", p.alpha0},
      {"T_s", p.T},                 {"n_max", p.n_max},
      {"omega0_rad_s", p.omega0},   {"omega_ge_rad_s", p.omega_ge},
      {"omega_ef_rad_s", p.omega_ef}};
  manifest["rates_angular"] = cfg.rates_angular;
  // Free g-branch cavity phases vanish at T when delta*T is a 2*pi multiple.
  manifest["delta_T_over_2pi"] = p.delta * p.T / kTwoPi;

  Emitter emit{cfg, result};

  auto finish = [&](int code, const std::string& msg) {
    result.exit_code = code;
    result.message = msg;
    manifest["status"] = code == 0 ? "ok" : msg;
    const std::string mpath =
        emit.dir_file("manifest_" + experiment_name(cfg.experiment) + ".json");
    try {
      std::ofstream out(mpath, std::ios::binary);
      out << manifest.dump(2) << "\n";
      result.manifest_path = mpath;
      result.files.push_back(mpath);
    } catch (...) {
      if (result.exit_code == 0) {
        result.exit_code = 4;
        result.message = "manifest write failed";
      }
    }
    return result;
  };

  try {
    RunContext ctx = make_run_context(p, gate, cfg.chi0);
    manifest["drive"] = drive_summary(ctx);
    const RegimeReport regime = regime_check(p, ctx.spec);
    manifest["regime"] = regime_to_json(regime);
    if (!regime.pass && !cfg.force)
      return finish(2, "regime check failed (use --force to override): " +
                           regime.summary());

    switch (cfg.experiment) {
      case Experiment::fields: {
        const auto ts = ctx.path.sample_times();
        Table path_t{{"t_us", "gamma1_rad", "gamma2_rad", "omega_x_rad_per_s",
                      "omega_y_rad_per_s"},
                     {}};
        Table fields_t{{"t_us", "omega_x_rad_per_s", "omega_y_rad_per_s"}, {}};
        for (double t : ts) {
          auto [ox, oy] = ctx.path.control_fields(t);
          path_t.add_row(
              {t * 1e6, ctx.path.gamma1(t), ctx.path.gamma2(t), ox, oy});
          fields_t.add_row({t * 1e6, ox, oy});
        }
        emit.csv(path_t, "path.csv");
        emit.csv(fields_t, "fields.csv");
        PlotStyle st;
        st.title = "control fields";
        st.x_label = "t (us)";
        st.y_label = "Omega (rad/s)";
        st.x_column = "t_us";
        st.y_columns = {"omega_x_rad_per_s", "omega_y_rad_per_s"};
        emit.plot(fields_t, st, "fields.svg");
        break;
      }

      case Experiment::phases: {
        const auto recs = lr_phase_table(ctx.path, 1001);
        Table t{{"t_us", "theta_d_minus_rad", "theta_g_minus_rad"}, {}};
        for (const auto& r : recs)
          t.add_row({r.t * 1e6, r.theta_d_minus, r.theta_g_minus});
        emit.csv(t, "phases.csv");
        PlotStyle st;
        st.title = "LR phases along the evolution";
        st.x_label = "t (us)";
        st.y_label = "phase (rad)";
        st.x_column = "t_us";
        st.y_columns = {"theta_d_minus_rad", "theta_g_minus_rad"};
        emit.plot(t, st, "phases.svg");
        manifest["theta_d_final_rad"] = recs.back().theta_d_minus;
        manifest["theta_g_final_rad"] = recs.back().theta_g_minus;
        break;
      }

      case Experiment::gates_effective: {
        Table t{{"t_us", "F_avg_pi_phase", "F_avg_not", "F_avg_hadamard"}, {}};
        std::array<GateRun, 3> runs;
        const auto gates = target_gates();
        for (int gi = 0; gi < 3; ++gi) {
          RunContext gctx = make_run_context(p, gates[gi], cfg.chi0);
          runs[gi] = run_effective_gate(gates[gi], gctx.path, nullptr, 1.0,
                                        cfg.steps_effective, cfg.checkpoints);
        }
        for (size_t i = 0; i < runs[0].trace.times.size(); ++i)
          t.add_row({runs[0].trace.times[i] * 1e6, runs[0].trace.values[i],
                     runs[1].trace.values[i], runs[2].trace.values[i]});
        emit.csv(t, "gates_effective.csv");
        PlotStyle st;
        st.title = "average gate fidelity, effective model";
        st.x_label = "t (us)";
        st.y_label = "F_avg";
        st.x_column = "t_us";
        st.y_columns = {"F_avg_pi_phase", "F_avg_not", "F_avg_hadamard"};
        emit.plot(t, st, "gates_effective.svg");
        manifest["final_fidelity"] = {{"pi_phase", runs[0].final_fidelity},
                                      {"not", runs[1].final_fidelity},
                                      {"hadamard", runs[2].final_fidelity}};
        break;
      }

      case Experiment::gates_full: {
        Table t{{"t_us", "F_avg_pi_phase", "F_avg_not", "F_avg_hadamard"}, {}};
        std::array<GateRun, 3> runs;
        const auto gates = target_gates();
        for (int gi = 0; gi < 3; ++gi) {
          RunContext gctx = make_run_context(p, gates[gi], cfg.chi0);
          runs[gi] = run_full_gate(gctx, cfg.steps_full, cfg.checkpoints);
        }
        for (size_t i = 0; i < runs[0].trace.times.size(); ++i)
          t.add_row({runs[0].trace.times[i] * 1e6, runs[0].trace.values[i],
                     runs[1].trace.values[i], runs[2].trace.values[i]});
        emit.csv(t, "gates_full.csv");
        PlotStyle st;
        st.title = "average gate fidelity, full model";
        st.x_label = "t (us)";
        st.y_label = "F_avg";
        st.x_column = "t_us";
        st.y_columns = {"F_avg_pi_phase", "F_avg_not", "F_avg_hadamard"};
        emit.plot(t, st, "gates_full.svg");
        manifest["final_fidelity"] = {{"pi_phase", runs[0].final_fidelity},
                                      {"not", runs[1].final_fidelity},
                                      {"hadamard", runs[2].final_fidelity}};

        if (!cfg.skip_convergence) {
          const GateSpec probe = make_gate(GateName::not_gate);
          SystemParams p5 = p;
          p5.n_max += 5;
          RunContext c5 = make_run_context(p5, probe, cfg.chi0);
          RunContext c0 = make_run_context(p, probe, cfg.chi0);
          const double f_ref = run_full_gate(c0, cfg.steps_full, 2).final_fidelity;
          const double f_cut = run_full_gate(c5, cfg.steps_full, 2).final_fidelity;
          const double f_half =
              run_full_gate(c0, cfg.steps_full * 2, 2).final_fidelity;
          ConvergenceReport conv{std::abs(f_cut - f_ref),
                                 std::abs(f_half - f_ref)};
          manifest["convergence"] = {{"cutoff_delta", conv.cutoff_delta},
                                     {"step_delta", conv.step_delta}};
          if (!conv.ok(kConvergenceTol))
            return finish(3, "convergence check failed: cutoff delta " +
                                 std::to_string(conv.cutoff_delta) +
                                 ", step delta " +
                                 std::to_string(conv.step_delta));
        }
        break;
      }

      case Experiment::systematic: {
        const auto eps = linspace(cfg.epsilon_min, cfg.epsilon_max,
                                  cfg.epsilon_points);
        const auto gates = target_gates();
        std::array<std::vector<double>, 3> fid;
        for (int gi = 0; gi < 3; ++gi) {
          fid[gi].resize(eps.size());
          RunContext gctx = make_run_context(p, gates[gi], cfg.chi0);
          const GeometricPath path = gctx.path;
          const GateSpec g = gates[gi];
          parallel_for(int(eps.size()), [&](int i) {
            fid[gi][i] = run_effective_gate(g, path, nullptr, 1.0 + eps[i],
                                            cfg.steps_effective, 2)
                             .final_fidelity;
          });
        }
        Table t{{"epsilon", "F_avg_pi_phase", "F_avg_not", "F_avg_hadamard"}, {}};
        for (size_t i = 0; i < eps.size(); ++i)
          t.add_row({eps[i], fid[0][i], fid[1][i], fid[2][i]});
        emit.csv(t, "systematic.csv");
        PlotStyle st;
        st.title = "final fidelity vs systematic error";
        st.x_label = "epsilon";
        st.y_label = "F_avg(T)";
        st.x_column = "epsilon";
        st.y_columns = {"F_avg_pi_phase", "F_avg_not", "F_avg_hadamard"};
        emit.plot(t, st, "systematic.svg");

        // Curvature comparison against the step-only reference path.
        const GateSpec ng = make_gate(GateName::not_gate);
        const GeometricPath designed = make_designed_path(p.T, ng.theta_g, cfg.chi0);
        const GeometricPath reference = make_step_only_path(p.T, ng.theta_g);
        auto curvature = [&](const GeometricPath& path) {
          double sxx = 0, sxy = 0;
          for (double e : {-0.05, -0.04, -0.03, -0.02, -0.01, 0.01, 0.02, 0.03,
                           0.04, 0.05}) {
            const double infid =
                1.0 - run_effective_gate(ng, path, nullptr, 1.0 + e,
                                         cfg.steps_effective, 2)
                          .final_fidelity;
            sxx += e * e * e * e;
            sxy += e * e * infid;
          }
          return sxy / sxx;
        };
        const double c_designed = curvature(designed);
        const double c_reference = curvature(reference);
        manifest["curvature"] = {
            {"designed", c_designed},
            {"reference", c_reference},
            {"ratio", c_reference / std::max(c_designed, 1e-300)}};
        double fmin = 1.0, eps_at_max = 0.0, fmax = 0.0;
        for (size_t i = 0; i < eps.size(); ++i) {
          fmin = std::min(fmin, fid[1][i]);
          if (fid[1][i] > fmax) {
            fmax = fid[1][i];
            eps_at_max = eps[i];
          }
        }
        manifest["not_gate_min_fidelity"] = fmin;
        manifest["not_gate_fidelity_peak_epsilon"] = eps_at_max;
        break;
      }

      case Experiment::awgn_samples: {
        const std::string model = cfg.model.empty() ? "full" : cfg.model;
        const SampledField clean = sample_fields(ctx.path);
        std::vector<double> fid(cfg.seeds_per_point);
        parallel_for(cfg.seeds_per_point, [&](int i) {
          const uint64_t run_seed = rng::counter_bits(cfg.seed, kStreamAwgnSamples, i);
          const SampledField noisy = with_awgn(clean, cfg.snr_db, run_seed);
          if (model == "effective") {
            fid[i] = run_effective_gate(
                         gate, ctx.path,
                         [noisy](double t) { return noisy.omega0(t); }, 1.0,
                         ctx.path.sample_count - 1, 2, Scheme::magnus2)
                         .final_fidelity;
          } else {
            RunContext nctx = ctx;
            nctx.spec.omega0_envelope = [noisy](double t) {
              return noisy.omega0(t);
            };
            fid[i] = run_full_gate(nctx, cfg.steps_full, 2,
                                   Scheme::split_static)
                         .final_fidelity;
          }
        });
        Table t{{"sample_index", "F_avg"}, {}};
        for (int i = 0; i < cfg.seeds_per_point; ++i)
          t.add_row({double(i), fid[i]});
        emit.csv(t, "awgn_samples.csv");
        PlotStyle st;
        st.title = "final fidelity under AWGN, R_N = " + std::to_string(cfg.snr_db);
        st.x_label = "simulation index";
        st.y_label = "F_avg(T)";
        st.x_column = "sample_index";
        st.y_columns = {"F_avg"};
        emit.plot(t, st, "awgn_samples.svg");
        const double lo = *std::min_element(fid.begin(), fid.end());
        const double hi = *std::max_element(fid.begin(), fid.end());
        manifest["awgn"] = {{"model", model},
                            {"snr_db", cfg.snr_db},
                            {"mean", mean_of(fid)},
                            {"min", lo},
                            {"max", hi},
                            {"spread", hi - lo}};
        break;
      }

      case Experiment::awgn_sweep: {
        const std::string model = cfg.model.empty() ? "full" : cfg.model;
        const SampledField clean = sample_fields(ctx.path);
        const auto snrs = linspace(cfg.snr_min, cfg.snr_max, cfg.snr_points);
        const int n_jobs = cfg.snr_points * cfg.seeds_per_point;
        std::vector<double> all(n_jobs);
        parallel_for(n_jobs, [&](int j) {
          const int pi = j / cfg.seeds_per_point;
          const int si = j % cfg.seeds_per_point;
          const uint64_t run_seed =
              rng::counter_bits(cfg.seed, kStreamAwgnSweep,
                                uint64_t(pi) << 32 | uint64_t(si));
          const SampledField noisy = with_awgn(clean, snrs[pi], run_seed);
          if (model == "effective") {
            all[j] = run_effective_gate(
                         gate, ctx.path,
                         [noisy](double t) { return noisy.omega0(t); }, 1.0,
                         ctx.path.sample_count - 1, 2, Scheme::magnus2)
                         .final_fidelity;
          } else {
            RunContext nctx = ctx;
            nctx.spec.omega0_envelope = [noisy](double t) {
              return noisy.omega0(t);
            };
            all[j] = run_full_gate(nctx, cfg.steps_full, 2,
                                   Scheme::split_static)
                         .final_fidelity;
          }
        });
        Table t{{"R_N", "F_mean", "F_std"}, {}};
        std::vector<double> means;
        for (int pi = 0; pi < cfg.snr_points; ++pi) {
          std::vector<double> pt(all.begin() + pi * cfg.seeds_per_point,
                                 all.begin() + (pi + 1) * cfg.seeds_per_point);
          t.add_row({snrs[pi], mean_of(pt), stddev_of(pt)});
          means.push_back(mean_of(pt));
        }
        emit.csv(t, "awgn_sweep.csv");
        const ExpFit fit = fit_exponential(snrs, means);
        Table ft{{"a", "b", "c", "rms_residual", "b_identifiable"}, {}};
        ft.add_row({fit.a, fit.b, fit.c, fit.rms_residual,
                    fit.b_identifiable ? 1.0 : 0.0});
        emit.csv(ft, "awgn_fit.csv");
        PlotStyle st;
        st.kind = PlotStyle::Kind::errorbar;
        st.title = "joint average fidelity vs SNR";
        st.x_label = "R_N (dB)";
        st.y_label = "F";
        st.x_column = "R_N";
        st.y_columns = {"F_mean"};
        st.stddev_column = "F_std";
        emit.plot(t, st, "awgn_sweep.svg");
        manifest["awgn_fit"] = {{"model", model},
                                {"a", fit.a},
                                {"b", fit.b},
                                {"c", fit.c},
                                {"rms_residual", fit.rms_residual},
                                {"b_identifiable", fit.b_identifiable}};
        break;
      }

      case Experiment::decoherence: {
        const double unit = cfg.rates_angular ? kTwoPi : 1.0;
        const auto fracs = linspace(0.0, 1.0, cfg.rate_points);
        std::vector<double> f_d(fracs.size()), f_s(fracs.size()),
            f_k(fracs.size());
        const int n_jobs = 3 * int(fracs.size());
        parallel_for(n_jobs, [&](int j) {
          const int family = j / int(fracs.size());
          const int i = j % int(fracs.size());
          DecoherenceRates r;
          if (family == 0) r.gamma_d = unit * cfg.rate_max_d * fracs[i];
          if (family == 1) r.gamma_s = unit * cfg.rate_max_s * fracs[i];
          if (family == 2) r.gamma_kappa = unit * cfg.rate_max_kappa * fracs[i];
          const double f = run_decoherence_point(ctx, r, cfg.steps_density);
          (family == 0 ? f_d : family == 1 ? f_s : f_k)[i] = f;
        });
        Table t{{"rate_frac", "F_g_dephasing", "F_g_relaxation",
                 "F_g_photon_loss"},
                {}};
        for (size_t i = 0; i < fracs.size(); ++i)
          t.add_row({fracs[i], f_d[i], f_s[i], f_k[i]});
        emit.csv(t, "decoherence.csv");
        PlotStyle st;
        st.title = "NOT-gate fidelity vs decoherence rate";
        st.x_label = "rate / rate_max";
        st.y_label = "F_g(T)";
        st.x_column = "rate_frac";
        st.y_columns = {"F_g_dephasing", "F_g_relaxation", "F_g_photon_loss"};
        emit.plot(t, st, "decoherence.svg");
        manifest["rate_max_1_s"] = {{"gamma_d", unit * cfg.rate_max_d},
                                    {"gamma_s", unit * cfg.rate_max_s},
                                    {"gamma_kappa", unit * cfg.rate_max_kappa}};
        manifest["final_fidelity"] = {{"dephasing_max", f_d.back()},
                                      {"relaxation_max", f_s.back()},
                                      {"photon_loss_max", f_k.back()}};

        if (!cfg.skip_convergence) {
          DecoherenceRates probe;
          probe.gamma_kappa = unit * cfg.rate_max_kappa;
          SystemParams p5 = p;
          p5.n_max += 5;
          RunContext c5 = make_run_context(p5, gate, cfg.chi0);
          const double f_ref = f_k.back();
          const double f_cut =
              run_decoherence_point(c5, probe, cfg.steps_density);
          const double f_half =
              run_decoherence_point(ctx, probe, cfg.steps_density * 2);
          ConvergenceReport conv{std::abs(f_cut - f_ref),
                                 std::abs(f_half - f_ref)};
          manifest["convergence"] = {{"cutoff_delta", conv.cutoff_delta},
                                     {"step_delta", conv.step_delta}};
          if (!conv.ok(kConvergenceTol))
            return finish(3, "convergence check failed: cutoff delta " +
                                 std::to_string(conv.cutoff_delta) +
                                 ", step delta " +
                                 std::to_string(conv.step_delta));
        }
        break;
      }

      case Experiment::all:
        break;  // handled above
    }
  } catch (const std::ios_base::failure& e) {
    return finish(4, std::string("I/O failure: ") + e.what());
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    if (msg.find("emit_csv") != std::string::npos ||
        msg.find("emit_plot") != std::string::npos ||
        msg.find("manifest") != std::string::npos)
      return finish(4, msg);
    throw;
  }

  return finish(0, "ok");
}

}  // namespace bingeo
