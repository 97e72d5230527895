#include "bingeo/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

using namespace bingeo;

namespace {

GateName gate_from_string(const std::string& s) {
  if (s == "pi" || s == "pi_phase" || s == "pi-phase") return GateName::pi_phase;
  if (s == "not") return GateName::not_gate;
  if (s == "hadamard" || s == "h") return GateName::hadamard;
  throw CLI::ValidationError("--gate", "unknown gate: " + s);
}

struct GlobalOpts {
  std::optional<std::string> config;
  std::optional<std::string> out;
  std::optional<uint64_t> seed;
  std::optional<int> fock_cutoff;
  std::optional<int> steps;
  std::optional<int> samples;
  std::optional<double> snr;
  std::optional<double> chi0;
  std::optional<std::string> model;
  std::optional<std::string> gate;
  bool force = false;
  bool fast = false;
  bool rates_angular = false;
  bool no_plots = false;
};

ExperimentConfig build_config(const GlobalOpts& g) {
  ExperimentConfig cfg;
  if (g.config) cfg = ExperimentConfig::from_file(*g.config);
  if (g.out) cfg.output_dir = *g.out;
  if (g.seed) cfg.seed = *g.seed;
  if (g.fock_cutoff) cfg.fock_cutoff = *g.fock_cutoff;
  if (g.steps) {
    cfg.steps_full = *g.steps;
    cfg.steps_effective = *g.steps;
    cfg.steps_density = *g.steps;
  }
  if (g.samples) cfg.seeds_per_point = *g.samples;
  if (g.snr) cfg.snr_db = *g.snr;
  if (g.chi0) cfg.chi0 = *g.chi0;
  if (g.model) cfg.model = *g.model;
  if (g.gate) cfg.gate = gate_from_string(*g.gate);
  cfg.force = g.force;
  cfg.fast = g.fast;
  cfg.rates_angular = g.rates_angular;
  if (g.no_plots) cfg.emit_plots = false;
  cfg.resolve_gate();
  return cfg;
}

int report(const SimResult& r) {
  if (r.exit_code == 0) {
    for (const auto& f : r.files) std::printf("wrote %s\n", f.c_str());
    std::printf("ok\n");
  } else {
    std::fprintf(stderr, "error (exit %d): %s\n", r.exit_code,
                 r.message.c_str());
  }
  return r.exit_code;
}

int run_simulate(const GlobalOpts& g) {
  ExperimentConfig cfg = build_config(g);
  const std::string model = cfg.model.empty() ? "effective" : cfg.model;
  const bool full = model == "full";
  SystemParams p = cfg.params;
  p.n_max = cfg.fock_cutoff > 0 ? cfg.fock_cutoff : 20;
  const GateSpec gate = (cfg.gate == GateName::custom)
                            ? custom_gate(cfg.theta, cfg.theta_g)
                            : make_gate(cfg.gate);
  RunContext ctx = make_run_context(p, gate, cfg.chi0);
  const RegimeReport regime = regime_check(p, ctx.spec);
  if (!regime.pass && !cfg.force) {
    std::fprintf(stderr, "%s", regime.summary().c_str());
    return 2;
  }
  GateRun run =
      full ? run_full_gate(ctx, cfg.steps_full, cfg.checkpoints)
           : run_effective_gate(gate, ctx.path, nullptr, 1.0,
                                cfg.steps_effective, cfg.checkpoints);
  std::filesystem::create_directories(cfg.output_dir);
  Table t{{"t_us", "F_avg"}, {}};
  for (size_t i = 0; i < run.trace.times.size(); ++i)
    t.add_row({run.trace.times[i] * 1e6, run.trace.values[i]});
  const std::string name = "simulate_" + gate.label() + "_" + model + ".csv";
  const std::string path =
      (std::filesystem::path(cfg.output_dir) / name).string();
  emit_csv(t, path);
  std::printf("wrote %s\n", path.c_str());
  std::printf("final average fidelity (%s, %s model): %.10f\n",
              gate.label().c_str(), model.c_str(), run.final_fidelity);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "bingeo: geometric gates on binomial codes in a cavity-qutrit system"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config, "key = value configuration file");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--seed", g.seed, "base RNG seed");
  app.add_option("--fock-cutoff", g.fock_cutoff, "Fock cutoff override");
  app.add_option("--steps", g.steps, "propagation steps override");
  app.add_option("--samples", g.samples, "seeds per stochastic sweep point");
  app.add_option("--snr", g.snr, "AWGN signal-to-noise ratio in dB");
  app.add_option("--chi0", g.chi0, "path coefficient chi0");
  app.add_option("--model", g.model, "model: effective or full");
  app.add_option("--gate", g.gate, "gate: pi|not|hadamard");
  app.add_flag("--force", g.force, "run even if the regime check fails");
  app.add_flag("--fast", g.fast, "shrunk sweeps for CI");
  app.add_flag("--rates-angular", g.rates_angular,
               "interpret decoherence rates as angular (multiply by 2*pi)");
  app.add_flag("--no-plots", g.no_plots, "skip SVG output");

  auto* design = app.add_subcommand(
      "design", "export the evolution path, control fields and LR phases");
  auto* simulate = app.add_subcommand(
      "simulate", "single-gate fidelity trace (effective or full model)");
  auto* sweep = app.add_subcommand("sweep", "parameter sweeps");
  std::string sweep_kind;
  sweep->add_option("kind", sweep_kind, "epsilon | snr | rates")->required();
  auto* reproduce = app.add_subcommand(
      "reproduce", "run a named experiment preset (fig2..fig6, phases, all)");
  std::string figure_id;
  reproduce->add_option("figure", figure_id, "experiment or figure id")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (design->parsed()) {
      ExperimentConfig cfg = build_config(g);
      cfg.experiment = Experiment::fields;
      SimResult r1 = run_experiment(cfg);
      if (r1.exit_code != 0) return report(r1);
      cfg.experiment = Experiment::phases;
      SimResult r2 = run_experiment(cfg);
      r2.files.insert(r2.files.begin(), r1.files.begin(), r1.files.end());
      return report(r2);
    }
    if (simulate->parsed()) return run_simulate(g);
    if (sweep->parsed()) {
      ExperimentConfig cfg = build_config(g);
      if (sweep_kind == "epsilon") cfg.experiment = Experiment::systematic;
      else if (sweep_kind == "snr") cfg.experiment = Experiment::awgn_sweep;
      else if (sweep_kind == "rates") cfg.experiment = Experiment::decoherence;
      else throw CLI::ValidationError("kind", "unknown sweep: " + sweep_kind);
      return report(run_experiment(cfg));
    }
    if (reproduce->parsed()) {
      ExperimentConfig cfg = build_config(g);
      cfg.experiment = experiment_from_string(figure_id);
      return report(run_experiment(cfg));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
