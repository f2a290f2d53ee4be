#pragma once

#include "latreg/clwe.hpp"
#include "latreg/lattice.hpp"
#include "latreg/reduction.hpp"

#include <json.hpp>

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace latreg {

enum class ExperimentKind {
  bdd_completeness,
  bdd_soundness,
  lasso_vs_kappa,
  babai_vs_lasso,
  re_trend,
  clwe_advantage,
  runtime_vs_k,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& s);

/// Secret-norm used by the desk-scale CLWE experiment. Chosen so that the
/// partite search finds in-budget solutions at enumerable dimension scales;
/// see README for the calibration.
inline constexpr double kDeskClweGamma = 1.0 / 280.0;

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::bdd_completeness;
  std::vector<int> d{8};
  std::vector<int> k{2};
  std::vector<int> m{136};
  std::vector<double> alpha{0.05};
  std::vector<double> kappa_target{1.0};
  std::vector<std::string> solver{"l0-partite"};
  std::vector<double> beta_exponent{};
  int trials = 0;
  std::uint64_t master_seed = 1;
  double noise_ratio = 1.0;
  bool record_wall_time = true;
  double trial_timeout_s = 60.0;
  int jobs = 1;
  int re_budget = 10000;
  // clwe-advantage knobs
  double clwe_gamma = kDeskClweGamma;
  double clwe_beta_coeff = 0.01;  // beta = coeff / sqrt(k)
  double clwe_scale_c = 0.3125;   // n = k * 2^(ceil(c * (m/k) * log2 m))
};

struct TrialRecord {
  std::string experiment;
  int d = 0;
  int k = 0;
  int m = 0;
  long n = 0;
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double kappa_target = std::numeric_limits<double>::quiet_NaN();
  double kappa_actual = std::numeric_limits<double>::quiet_NaN();
  double lambda1_bin = std::numeric_limits<double>::quiet_NaN();
  std::string solver;
  int trial = 0;
  std::uint64_t seed = 0;
  bool success = false;
  double residual_mse = std::numeric_limits<double>::quiet_NaN();
  double prediction_error = std::numeric_limits<double>::quiet_NaN();
  double re_estimate = std::numeric_limits<double>::quiet_NaN();
  double wall_time_ms = std::numeric_limits<double>::quiet_NaN();
  bool timed_out = false;
};

void validate_config(const ExperimentConfig& cfg);

/// One record per (cell, trial), in deterministic cell-major order regardless
/// of the worker count. Per-trial failures are recorded, never thrown.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg);

/// Derived per-trial seed; pinned to SplitMix64 absorption of
/// (master_seed, experiment, d, k, m, alpha, kappa, solver, beta, trial).
std::uint64_t derive_trial_seed(const ExperimentConfig& cfg, int d, int k, int m, double alpha,
                                double kappa, const std::string& solver, double beta_exp,
                                int trial);

void emit_csv(const std::vector<TrialRecord>& records, const std::string& path);
std::vector<TrialRecord> parse_csv(const std::string& path);
void emit_json(const std::vector<TrialRecord>& records, const std::string& path);
void emit_plot_script(ExperimentKind kind, const std::string& csv_path,
                      const std::string& out_path);

nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Versioned, content-hashed instance files.
void save_bdd_instance(const std::string& path, const BinaryBddInstance& inst);
BinaryBddInstance load_bdd_instance(const std::string& path);
void save_slr_instance(const std::string& path, const SlrInstance& inst);
SlrInstance load_slr_instance(const std::string& path);
void save_transcript(const std::string& path, const ReductionTranscript& tr);
ReductionTranscript load_transcript(const std::string& path);
void save_clwe_sample(const std::string& path, const ClweSample& sample, bool include_secrets);
ClweSample load_clwe_sample(const std::string& path);

/// Name-based solver lookup for configs and the command line.
SlrSolver solver_from_name(const std::string& name);

}  // namespace latreg
