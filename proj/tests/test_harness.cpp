#include "latreg/harness.hpp"

#include "latreg/errors.hpp"
#include "latreg/serialize.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

using namespace latreg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("latreg_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_completeness_config() {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::bdd_completeness;
  cfg.d = {6};
  cfg.k = {2};
  cfg.m = {102};
  cfg.alpha = {0.05};
  cfg.kappa_target = {1.0, 4.0};
  cfg.solver = {"l0-partite"};
  cfg.trials = 8;
  cfg.master_seed = 99;
  cfg.record_wall_time = false;
  return cfg;
}

}  // namespace

TEST_CASE("derived seeds are deterministic and collision free") {
  const ExperimentConfig cfg = small_completeness_config();
  std::set<std::uint64_t> seen;
  for (double kappa : cfg.kappa_target)
    for (int t = 0; t < cfg.trials; ++t) {
      const auto seed =
          derive_trial_seed(cfg, 6, 2, 102, 0.05, kappa, "l0-partite", 0.0, t);
      CHECK(seed ==
            derive_trial_seed(cfg, 6, 2, 102, 0.05, kappa, "l0-partite", 0.0, t));
      CHECK(seen.insert(seed).second);
    }
}

TEST_CASE("config validation rejects malformed grids") {
  ExperimentConfig cfg = small_completeness_config();
  cfg.k = {4};  // does not divide 6
  CHECK_THROWS_AS(validate_config(cfg), ConfigInvalid);

  cfg = small_completeness_config();
  cfg.m = {50};  // < 17 d
  CHECK_THROWS_AS(validate_config(cfg), ConfigInvalid);

  cfg = small_completeness_config();
  cfg.solver = {"quantum"};
  CHECK_THROWS_AS(validate_config(cfg), ConfigInvalid);

  cfg = small_completeness_config();
  cfg.trials = -1;
  CHECK_THROWS_AS(validate_config(cfg), ConfigInvalid);
}

TEST_CASE("zero trials produce an empty record set") {
  ExperimentConfig cfg = small_completeness_config();
  cfg.trials = 0;
  CHECK(run_experiment(cfg).empty());
}

TEST_CASE("completeness experiment succeeds at an easy cell") {
  const ExperimentConfig cfg = small_completeness_config();
  const auto records = run_experiment(cfg);
  REQUIRE(records.size() == 16);
  int successes = 0;
  for (const auto& r : records) {
    CHECK(r.experiment == "bdd-completeness");
    CHECK(r.n == 16);
    CHECK(std::isfinite(r.lambda1_bin));
    successes += r.success;
  }
  CHECK(successes == 16);
}

TEST_CASE("reruns are byte identical across worker counts") {
  TempDir dir;
  ExperimentConfig cfg = small_completeness_config();
  cfg.jobs = 1;
  emit_csv(run_experiment(cfg), dir.file("a.csv"));
  cfg.jobs = 4;
  emit_csv(run_experiment(cfg), dir.file("b.csv"));
  CHECK(slurp(dir.file("a.csv")) == slurp(dir.file("b.csv")));
}

TEST_CASE("csv emission round trips") {
  TempDir dir;
  std::vector<TrialRecord> records;

  SUBCASE("no records gives a header-only file") {
    emit_csv(records, dir.file("empty.csv"));
    const std::string text = slurp(dir.file("empty.csv"));
    CHECK(text ==
          "experiment,d,k,m,n,alpha,kappa_target,kappa_actual,lambda1_bin,solver,trial,seed,"
          "success,residual_mse,prediction_error,re_estimate,wall_time_ms\n");
    CHECK(parse_csv(dir.file("empty.csv")).empty());
  }

  SUBCASE("one record gives two lines and parses back") {
    TrialRecord r;
    r.experiment = "bdd-completeness";
    r.d = 8;
    r.k = 2;
    r.m = 136;
    r.n = 32;
    r.alpha = 0.05;
    r.kappa_target = 10.0;
    r.kappa_actual = 10.000321;
    r.lambda1_bin = 1.2345678901234567;
    r.solver = "l0-partite";
    r.trial = 3;
    r.seed = 18446744073709551615ULL;
    r.success = true;
    r.residual_mse = 1e-17;
    r.prediction_error = 0.0;
    r.re_estimate = std::numeric_limits<double>::quiet_NaN();
    r.wall_time_ms = 12.5;
    records.push_back(r);
    emit_csv(records, dir.file("one.csv"));

    std::ifstream in(dir.file("one.csv"));
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 2);

    const auto parsed = parse_csv(dir.file("one.csv"));
    REQUIRE(parsed.size() == 1);
    const TrialRecord& p = parsed[0];
    CHECK(p.experiment == r.experiment);
    CHECK(p.d == r.d);
    CHECK(p.k == r.k);
    CHECK(p.m == r.m);
    CHECK(p.n == r.n);
    CHECK(p.alpha == r.alpha);
    CHECK(p.kappa_target == r.kappa_target);
    CHECK(p.kappa_actual == r.kappa_actual);
    CHECK(p.lambda1_bin == r.lambda1_bin);
    CHECK(p.solver == r.solver);
    CHECK(p.trial == r.trial);
    CHECK(p.seed == r.seed);
    CHECK(p.success == r.success);
    CHECK(p.residual_mse == r.residual_mse);
    CHECK(p.prediction_error == r.prediction_error);
    CHECK(std::isnan(p.re_estimate));
    CHECK(p.wall_time_ms == r.wall_time_ms);
  }
}

TEST_CASE("instance files round trip and detect tampering") {
  TempDir dir;
  RngEngine rng = make_engine(7);

  SUBCASE("bdd instances") {
    const LatticeBasis basis = sample_random_basis(4, 3.0, rng);
    const BinaryBddInstance inst = make_binary_bdd(basis, 0.1, 1.0, rng);
    save_bdd_instance(dir.file("inst.json"), inst);
    const BinaryBddInstance loaded = load_bdd_instance(dir.file("inst.json"));
    CHECK(loaded.basis.matrix().isApprox(inst.basis.matrix(), 0.0));
    CHECK(loaded.target.isApprox(inst.target, 0.0));
    CHECK(loaded.alpha == inst.alpha);
    REQUIRE(loaded.hidden.has_value());
    CHECK(loaded.hidden->z == inst.hidden->z);
    CHECK(loaded.hidden->e.isApprox(inst.hidden->e, 0.0));
  }

  SUBCASE("slr instances") {
    SlrInstance inst;
    inst.x = normal_matrix(34, 8, rng);
    inst.y = normal_vector(34, rng);
    inst.delta = 0.125;
    inst.k = 2;
    inst.provenance = "synthetic";
    save_slr_instance(dir.file("slr.json"), inst);
    const SlrInstance loaded = load_slr_instance(dir.file("slr.json"));
    CHECK(loaded.x.isApprox(inst.x, 0.0));
    CHECK(loaded.y.isApprox(inst.y, 0.0));
    CHECK(loaded.delta == inst.delta);
  }

  SUBCASE("tampered payloads are rejected") {
    const LatticeBasis basis = sample_random_basis(3, 1.0, rng);
    const BinaryBddInstance inst = make_binary_bdd(basis, 0.1, 1.0, rng);
    save_bdd_instance(dir.file("inst.json"), inst);
    auto j = nlohmann::json::parse(slurp(dir.file("inst.json")));
    j["payload"]["alpha"] = "0.25";
    std::ofstream(dir.file("tampered.json")) << j.dump();
    CHECK_THROWS_AS(load_bdd_instance(dir.file("tampered.json")), HashMismatch);

    j["schema_version"] = 999;
    std::ofstream(dir.file("future.json")) << j.dump();
    CHECK_THROWS_AS(load_bdd_instance(dir.file("future.json")), SchemaVersionUnsupported);
  }
}

TEST_CASE("json and plot emission") {
  TempDir dir;
  ExperimentConfig cfg = small_completeness_config();
  cfg.trials = 2;
  const auto records = run_experiment(cfg);
  emit_json(records, dir.file("records.json"));
  const auto parsed = nlohmann::json::parse(slurp(dir.file("records.json")));
  CHECK(parsed.is_array());
  CHECK(parsed.size() == records.size());
  CHECK(parsed[0].at("experiment") == "bdd-completeness");

  emit_plot_script(ExperimentKind::bdd_completeness, dir.file("records.csv"),
                   dir.file("plot.py"));
  const std::string script = slurp(dir.file("plot.py"));
  CHECK(script.find("bdd-completeness") != std::string::npos);
  CHECK(script.find("matplotlib") != std::string::npos);
}

TEST_CASE("config json round trips") {
  ExperimentConfig cfg = small_completeness_config();
  cfg.beta_exponent = {0.5, 1.0};
  cfg.jobs = 3;
  const ExperimentConfig parsed = config_from_json(config_to_json(cfg));
  CHECK(parsed.experiment == cfg.experiment);
  CHECK(parsed.d == cfg.d);
  CHECK(parsed.k == cfg.k);
  CHECK(parsed.m == cfg.m);
  CHECK(parsed.alpha == cfg.alpha);
  CHECK(parsed.kappa_target == cfg.kappa_target);
  CHECK(parsed.solver == cfg.solver);
  CHECK(parsed.beta_exponent == cfg.beta_exponent);
  CHECK(parsed.trials == cfg.trials);
  CHECK(parsed.master_seed == cfg.master_seed);
  CHECK(parsed.record_wall_time == cfg.record_wall_time);
  CHECK(parsed.jobs == cfg.jobs);
}

TEST_CASE("soundness experiment flags nothing at a sound cell") {
  ExperimentConfig cfg = small_completeness_config();
  cfg.experiment = ExperimentKind::bdd_soundness;
  cfg.kappa_target = {2.0};
  cfg.trials = 5;
  const auto records = run_experiment(cfg);
  for (const auto& r : records) CHECK(r.success);
}

TEST_CASE("the success flag matches a by-hand rerun of the recorded seed") {
  ExperimentConfig cfg = small_completeness_config();
  cfg.experiment = ExperimentKind::lasso_vs_kappa;
  cfg.alpha = {1e-4};
  cfg.kappa_target = {1.0};
  cfg.solver = {"thresholded-lasso"};
  cfg.trials = 3;
  const auto records = run_experiment(cfg);
  for (const auto& r : records) {
    RngEngine rng = make_engine(r.seed);
    const LatticeBasis basis = sample_random_basis(r.d, r.kappa_target, rng);
    const BinaryBddInstance inst = make_binary_bdd(basis, r.alpha, cfg.noise_ratio, rng);
    auto [slr, tr] = build_slr_instance(inst, r.m, r.k, *inst.lambda1_bin, rng);
    const SolveResult sol = solver_from_name(r.solver)(slr, tr.params.shape);
    const ExtractOutcome out = extract_bdd_solution(threshold_topk(sol.theta, r.k), tr);
    const bool expect =
        out.status == ExtractStatus::ok && verify_binary_bdd_solution(inst, *out.z);
    REQUIRE(r.success == expect);
  }
}
