#include "latreg/errors.hpp"
#include "latreg/harness.hpp"
#include "latreg/serialize.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

namespace fs = std::filesystem;
using namespace latreg;

int cmd_gen_bdd(int d, double alpha, double kappa, double noise_ratio, std::uint64_t seed,
                const std::string& out) {
  RngEngine rng = make_engine(seed);
  const LatticeBasis basis = sample_random_basis(d, kappa, rng);
  const BinaryBddInstance inst = make_binary_bdd(basis, alpha, noise_ratio, rng);
  save_bdd_instance(out, inst);
  std::cout << "wrote " << out << " (d=" << d << ", kappa=" << basis.kappa()
            << ", lambda1_bin=" << *inst.lambda1_bin << ")\n";
  return 0;
}

int cmd_reduce(const std::string& instance_path, int m, int k, std::uint64_t seed,
               const std::string& out_dir) {
  const BinaryBddInstance inst = load_bdd_instance(instance_path);
  RngEngine rng = make_engine(seed);
  const double lambda1_hat = lambda1_bin_exact(inst.basis);
  auto [slr, transcript] = build_slr_instance(inst, m, k, lambda1_hat, rng);
  transcript.rng_seed = seed;
  fs::create_directories(out_dir);
  save_slr_instance((fs::path(out_dir) / "slr.json").string(), slr);
  save_transcript((fs::path(out_dir) / "transcript.json").string(), transcript);
  std::cout << "wrote " << out_dir << "/slr.json and transcript.json (n=" << slr.x.cols()
            << ", delta=" << slr.delta << ")\n";
  return 0;
}

int cmd_solve(const std::string& slr_path, const std::string& solver_name,
              const std::string& out) {
  const SlrInstance inst = load_slr_instance(slr_path);
  const SlrSolver solver = solver_from_name(solver_name);
  const SolveResult result = solver(inst, GadgetShape{});
  std::ofstream file(out);
  if (!file) throw IoError("cannot open " + out);
  file << solve_result_to_json(result).dump(2) << "\n";
  const double mse = (inst.x * result.theta - inst.y).squaredNorm() / inst.x.rows();
  std::cout << "wrote " << out << " (residual_mse=" << mse << ", budget=" << inst.delta * inst.delta
            << ", " << (mse <= inst.delta * inst.delta ? "within" : "outside") << " budget)\n";
  return 0;
}

int cmd_verify(const std::string& instance_path, const std::string& theta_path,
               const std::string& transcript_path) {
  const BinaryBddInstance inst = load_bdd_instance(instance_path);
  std::ifstream file(theta_path);
  if (!file) throw IoError("cannot open " + theta_path);
  nlohmann::json j;
  file >> j;
  const Eigen::VectorXd theta = vector_from_json(j.at("theta"));
  const ReductionTranscript transcript = load_transcript(transcript_path);
  const ExtractOutcome out = extract_bdd_solution(theta, transcript);
  if (out.status != ExtractStatus::ok) {
    std::cout << "extraction failed: "
              << (out.status == ExtractStatus::not_k_sparse ? "not k-sparse" : "not partite")
              << "\n";
    return 1;
  }
  const bool ok = verify_binary_bdd_solution(inst, *out.z);
  std::cout << (ok ? "verified" : "rejected") << "\n";
  return ok ? 0 : 1;
}

int cmd_clwe(int m, long n, int k, double gamma, double beta, bool null_arm,
             std::uint64_t seed, bool include_secrets, const std::string& out) {
  RngEngine rng = make_engine(seed);
  if (n % k != 0) throw ConfigInvalid("k must divide n");
  const ClweSample sample =
      null_arm ? sample_null(m, n, rng) : sample_clwe(m, n, gamma, beta, rng);
  save_clwe_sample(out, sample, include_secrets);
  std::cout << "wrote " << out << " (" << sample.provenance << ", m=" << m << ", n=" << n
            << ")\n";
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir,
                   std::optional<std::uint64_t> seed, std::optional<int> jobs) {
  std::ifstream file(config_path);
  if (!file) throw IoError("cannot open " + config_path);
  nlohmann::json j;
  try {
    file >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigInvalid(std::string("bad config: ") + e.what());
  }
  ExperimentConfig cfg = config_from_json(j);
  if (seed) cfg.master_seed = *seed;
  if (jobs) cfg.jobs = *jobs;
  const auto records = run_experiment(cfg);
  fs::create_directories(out_dir);
  const std::string base = (fs::path(out_dir) / to_string(cfg.experiment)).string();
  emit_csv(records, base + ".csv");
  emit_json(records, base + ".json");
  emit_plot_script(cfg.experiment, base + ".csv", base + "_plot.py");
  std::size_t successes = 0;
  for (const auto& r : records) successes += r.success ? 1 : 0;
  std::cout << records.size() << " trials, " << successes << " successes; wrote " << base
            << ".{csv,json} and plot script\n";
  return 0;
}

int cmd_emit_plots(const std::string& csv_path, const std::string& kind_name,
                   const std::string& out) {
  emit_plot_script(experiment_kind_from_string(kind_name), csv_path, out);
  std::cout << "wrote " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice-to-sparse-regression reduction toolkit"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string out = "out.json";
  std::string out_dir = "out";
  bool include_secrets = false;

  auto* gen = app.add_subcommand("gen-bdd", "Generate a binary BDD instance");
  int gen_d = 8;
  double gen_alpha = 0.05, gen_kappa = 1.0, gen_noise = 1.0;
  gen->add_option("--d", gen_d, "dimension");
  gen->add_option("--alpha", gen_alpha, "error ratio, in (0, 1/2)");
  gen->add_option("--kappa", gen_kappa, "condition number target");
  gen->add_option("--noise-ratio", gen_noise, "fraction of the promise radius used");
  gen->add_option("--seed", seed, "rng seed");
  gen->add_option("--out", out, "output file");

  auto* red = app.add_subcommand("reduce", "Reduce a BDD instance to sparse regression");
  std::string red_instance;
  int red_m = 136, red_k = 2;
  red->add_option("--instance", red_instance, "instance file")->required();
  red->add_option("--m", red_m, "sample count (>= 17 d)");
  red->add_option("--k", red_k, "sparsity (divides d)");
  red->add_option("--seed", seed, "rng seed");
  red->add_option("--out", out_dir, "output directory");

  auto* sol = app.add_subcommand("solve", "Solve a sparse regression instance");
  std::string sol_instance, sol_solver = "l0-partite";
  sol->add_option("--instance", sol_instance, "slr instance file")->required();
  sol->add_option("--solver", sol_solver, "l0-partite | l0-general | thresholded-lasso");
  sol->add_option("--out", out, "output file");

  auto* ver = app.add_subcommand("verify", "Check a solution against a BDD instance");
  std::string ver_instance, ver_theta, ver_transcript;
  ver->add_option("--instance", ver_instance, "bdd instance file")->required();
  ver->add_option("--solution", ver_theta, "solve output file")->required();
  ver->add_option("--transcript", ver_transcript, "reduction transcript")->required();

  auto* clw = app.add_subcommand("clwe", "Sample a CLWE or null instance");
  int clwe_m = 16, clwe_k = 4;
  long clwe_n = 128;
  double clwe_gamma = kDeskClweGamma, clwe_beta = 0.005;
  bool clwe_null = false;
  clw->add_option("--m", clwe_m, "dimension");
  clw->add_option("--n", clwe_n, "samples (multiple of k)");
  clw->add_option("--k", clwe_k, "sparsity");
  clw->add_option("--gamma", clwe_gamma, "secret norm");
  clw->add_option("--beta", clwe_beta, "error width");
  clw->add_flag("--null", clwe_null, "draw from the null distribution");
  clw->add_option("--seed", seed, "rng seed");
  clw->add_flag("--include-secrets", include_secrets, "persist the hidden secret");
  clw->add_option("--out", out, "output file");

  auto* exp = app.add_subcommand("experiment", "Run a seeded experiment sweep");
  std::string exp_config;
  std::optional<std::uint64_t> exp_seed;
  std::optional<int> exp_jobs;
  exp->add_option("--config", exp_config, "experiment config JSON")->required();
  exp->add_option("--out", out_dir, "output directory");
  exp->add_option("--seed", exp_seed, "override master seed");
  exp->add_option("--jobs", exp_jobs, "worker count");

  auto* plots = app.add_subcommand("emit-plots", "Write a plot script for an experiment CSV");
  std::string plot_csv, plot_kind = "bdd-completeness";
  plots->add_option("--csv", plot_csv, "records CSV")->required();
  plots->add_option("--kind", plot_kind, "experiment kind");
  plots->add_option("--out", out, "output script path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_bdd(gen_d, gen_alpha, gen_kappa, gen_noise, seed, out);
    if (red->parsed()) return cmd_reduce(red_instance, red_m, red_k, seed, out_dir);
    if (sol->parsed()) return cmd_solve(sol_instance, sol_solver, out);
    if (ver->parsed()) return cmd_verify(ver_instance, ver_theta, ver_transcript);
    if (clw->parsed())
      return cmd_clwe(clwe_m, clwe_n, clwe_k, clwe_gamma, clwe_beta, clwe_null, seed,
                      include_secrets, out);
    if (exp->parsed()) return cmd_experiment(exp_config, out_dir, exp_seed, exp_jobs);
    if (plots->parsed()) return cmd_emit_plots(plot_csv, plot_kind, out);
  } catch (const ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const BadShape& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionViolated& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const HashMismatch& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const SchemaVersionUnsupported& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
