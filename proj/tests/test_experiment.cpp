#include "bingeo/experiment.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bingeo;

namespace {

namespace fs = std::filesystem;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct TempDir {
  fs::path dir;
  explicit TempDir(const std::string& name) : dir(fs::temp_directory_path() / name) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  std::string str() const { return dir.string(); }
};

}  // namespace

TEST_CASE("csv emission") {
  TempDir tmp("bingeo_csv_test");

  SUBCASE("empty table produces a header-only file") {
    Table t{{"t_us", "F_avg"}, {}};
    const std::string p = tmp.str() + "/empty.csv";
    emit_csv(t, p);
    CHECK(slurp(p) == "t_us,F_avg\n");
  }

  SUBCASE("round trip reproduces values") {
    Table t{{"epsilon", "value"}, {}};
    t.add_row({-0.2, 0.99123456789012});
    t.add_row({0.15, 1.0 / 3.0});
    t.add_row({1e-9, 2.5e8});
    const std::string p = tmp.str() + "/roundtrip.csv";
    emit_csv(t, p);
    const Table back = read_csv(p);
    REQUIRE(back.columns == t.columns);
    REQUIRE(back.rows.size() == t.rows.size());
    for (size_t i = 0; i < t.rows.size(); ++i)
      for (size_t j = 0; j < t.rows[i].size(); ++j)
        CHECK(back.rows[i][j] == doctest::Approx(t.rows[i][j]).epsilon(1e-11));
  }

  SUBCASE("row width enforced") {
    Table t{{"a", "b"}, {}};
    CHECK_THROWS_AS(t.add_row({1.0}), std::invalid_argument);
  }
}

TEST_CASE("svg plots") {
  TempDir tmp("bingeo_svg_test");
  Table t{{"x", "y1", "y2", "sd"}, {}};
  for (int i = 0; i <= 10; ++i)
    t.add_row({double(i), 0.1 * i, 1.0 - 0.05 * i, 0.02});

  SUBCASE("line plot emits polylines and legend") {
    PlotStyle st;
    st.x_column = "x";
    st.y_columns = {"y1", "y2"};
    const std::string p = tmp.str() + "/line.svg";
    emit_plot(t, st, p);
    const std::string body = slurp(p);
    CHECK(body.find("<polyline") != std::string::npos);
    CHECK(body.find(">y1<") != std::string::npos);
    CHECK(body.find(">y2<") != std::string::npos);
  }

  SUBCASE("errorbar style requires the stddev column") {
    PlotStyle st;
    st.kind = PlotStyle::Kind::errorbar;
    st.x_column = "x";
    st.y_columns = {"y1"};
    CHECK_THROWS_AS(emit_plot(t, st, tmp.str() + "/bad.svg"),
                    std::invalid_argument);
    st.stddev_column = "sd";
    emit_plot(t, st, tmp.str() + "/err.svg");
    CHECK(slurp(tmp.str() + "/err.svg").find("<line") != std::string::npos);
  }
}

TEST_CASE("experiment name mapping") {
  CHECK(experiment_from_string("fig3a") == Experiment::gates_effective);
  CHECK(experiment_from_string("gates-full") == Experiment::gates_full);
  CHECK(experiment_from_string("fig6") == Experiment::decoherence);
  CHECK(experiment_from_string("all") == Experiment::all);
  CHECK_THROWS_AS(experiment_from_string("fig9"), std::invalid_argument);
}

TEST_CASE("config file ingestion") {
  TempDir tmp("bingeo_cfg_test");
  const std::string cfgpath = tmp.str() + "/run.conf";
  {
    std::ofstream out(cfgpath);
    out << "# comment\n"
        << "experiment = fig4\n"
        << "gate = hadamard\n"
        << "lambda_hz = 4.62e8\n"
        << "T_us = 5\n"
        << "seed = 99\n"
        << "samples = 7\n"
        << "epsilon_points = 21\n"
        << "output_dir = " << tmp.str() << "/out\n";
  }
  const ExperimentConfig cfg = ExperimentConfig::from_file(cfgpath);
  CHECK(cfg.experiment == Experiment::systematic);
  CHECK(cfg.gate == GateName::hadamard);
  CHECK(cfg.params.lambda == doctest::Approx(kTwoPi * 4.62e8));
  CHECK(cfg.seed == 99);
  CHECK(cfg.seeds_per_point == 7);
  CHECK(cfg.epsilon_points == 21);
}

TEST_CASE("fields experiment is deterministic and complete") {
  TempDir a("bingeo_fields_a"), b("bingeo_fields_b");
  ExperimentConfig cfg;
  cfg.experiment = Experiment::fields;
  cfg.emit_plots = true;
  cfg.output_dir = a.str();

  const SimResult r1 = run_experiment(cfg);
  REQUIRE(r1.exit_code == 0);
  CHECK(fs::exists(a.dir / "fields.csv"));
  CHECK(fs::exists(a.dir / "path.csv"));
  CHECK(fs::exists(a.dir / "fields.svg"));
  CHECK(fs::exists(a.dir / "manifest_fields.json"));

  cfg.output_dir = b.str();
  const SimResult r2 = run_experiment(cfg);
  REQUIRE(r2.exit_code == 0);
  CHECK(slurp(a.str() + "/fields.csv") == slurp(b.str() + "/fields.csv"));
  CHECK(slurp(a.str() + "/path.csv") == slurp(b.str() + "/path.csv"));
  CHECK(slurp(a.str() + "/manifest_fields.json") ==
        slurp(b.str() + "/manifest_fields.json"));
}

TEST_CASE("stochastic experiments are reproducible byte for byte") {
  TempDir a("bingeo_awgn_a"), b("bingeo_awgn_b");
  ExperimentConfig cfg;
  cfg.experiment = Experiment::awgn_samples;
  cfg.model = "effective";
  cfg.seeds_per_point = 3;
  cfg.steps_effective = 800;
  cfg.emit_plots = false;
  cfg.seed = 2024;
  cfg.output_dir = a.str();
  REQUIRE(run_experiment(cfg).exit_code == 0);
  cfg.output_dir = b.str();
  REQUIRE(run_experiment(cfg).exit_code == 0);
  CHECK(slurp(a.str() + "/awgn_samples.csv") ==
        slurp(b.str() + "/awgn_samples.csv"));
}

TEST_CASE("regime gate produces exit code 2 unless forced") {
  TempDir tmp("bingeo_regime_test");
  ExperimentConfig cfg;
  cfg.experiment = Experiment::fields;
  cfg.params.lambda = kTwoPi * 1e6;  // drives Omega/Delta far from the tiers
  cfg.emit_plots = false;
  cfg.output_dir = tmp.str();
  const SimResult r = run_experiment(cfg);
  CHECK(r.exit_code == 2);

  cfg.force = true;
  const SimResult rf = run_experiment(cfg);
  CHECK(rf.exit_code == 0);
}

TEST_CASE("phases experiment records the endpoint values") {
  TempDir tmp("bingeo_phases_test");
  ExperimentConfig cfg;
  cfg.experiment = Experiment::phases;
  cfg.emit_plots = false;
  cfg.output_dir = tmp.str();
  const SimResult r = run_experiment(cfg);
  REQUIRE(r.exit_code == 0);
  const Table t = read_csv(tmp.str() + "/phases.csv");
  REQUIRE(t.rows.size() == 1001);
  const int di = t.col_index("theta_d_minus_rad");
  const int gi = t.col_index("theta_g_minus_rad");
  REQUIRE(di >= 0);
  REQUIRE(gi >= 0);
  CHECK(std::abs(t.rows.back()[di]) < 1e-6);
  CHECK(t.rows.back()[gi] == doctest::Approx(3.14159265358979).epsilon(1e-6));
}
