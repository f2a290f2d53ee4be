#include "latreg/harness.hpp"

#include "latreg/errors.hpp"
#include "latreg/hashing.hpp"
#include "latreg/serialize.hpp"
#include "latreg/solvers.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

namespace latreg {

using nlohmann::json;

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::bdd_completeness: return "bdd-completeness";
    case ExperimentKind::bdd_soundness: return "bdd-soundness";
    case ExperimentKind::lasso_vs_kappa: return "lasso-vs-kappa";
    case ExperimentKind::babai_vs_lasso: return "babai-vs-lasso";
    case ExperimentKind::re_trend: return "re-trend";
    case ExperimentKind::clwe_advantage: return "clwe-advantage";
    case ExperimentKind::runtime_vs_k: return "runtime-vs-k";
  }
  throw ConfigInvalid("unknown experiment kind");
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (auto kind : {ExperimentKind::bdd_completeness, ExperimentKind::bdd_soundness,
                    ExperimentKind::lasso_vs_kappa, ExperimentKind::babai_vs_lasso,
                    ExperimentKind::re_trend, ExperimentKind::clwe_advantage,
                    ExperimentKind::runtime_vs_k})
    if (to_string(kind) == s) return kind;
  throw ConfigInvalid("unknown experiment kind: " + s);
}

SlrSolver solver_from_name(const std::string& name) {
  if (name == "l0-partite") return make_l0_partite_solver();
  if (name == "l0-general") return make_l0_general_solver();
  if (name == "thresholded-lasso") return make_thresholded_lasso_solver();
  throw ConfigInvalid("unknown solver: " + name);
}

namespace {

struct Cell {
  int d = 0, k = 0, m = 0;
  double alpha = 0.0, kappa = 0.0, beta_exp = 0.0;
  bool has_beta = false;
  std::string solver;
};

bool is_bdd_family(ExperimentKind kind) { return kind != ExperimentKind::clwe_advantage; }

std::vector<Cell> enumerate_cells(const ExperimentConfig& cfg) {
  std::vector<double> betas = cfg.beta_exponent;
  const bool has_beta = !betas.empty();
  if (!has_beta) betas.push_back(0.0);
  std::vector<Cell> cells;
  for (int d : cfg.d)
    for (int k : cfg.k)
      for (int m : cfg.m)
        for (double alpha : cfg.alpha)
          for (double kappa : cfg.kappa_target)
            for (const auto& solver : cfg.solver)
              for (double beta : betas)
                cells.push_back(Cell{d, k, m, alpha, kappa, beta, has_beta, solver});
  return cells;
}

}  // namespace

std::uint64_t derive_trial_seed(const ExperimentConfig& cfg, int d, int k, int m, double alpha,
                                double kappa, const std::string& solver, double beta_exp,
                                int trial) {
  return mix_seed({cfg.master_seed, fnv1a64(to_string(cfg.experiment)),
                   static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(k),
                   static_cast<std::uint64_t>(m), seed_word(alpha), seed_word(kappa),
                   fnv1a64(solver), seed_word(beta_exp), static_cast<std::uint64_t>(trial)});
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.trials < 0) throw ConfigInvalid("trials must be nonnegative");
  if (cfg.jobs < 1) throw ConfigInvalid("jobs must be >= 1");
  if (cfg.d.empty() || cfg.k.empty() || cfg.m.empty() || cfg.alpha.empty() ||
      cfg.kappa_target.empty() || cfg.solver.empty())
    throw ConfigInvalid("every grid must be nonempty");
  for (const auto& cell : enumerate_cells(cfg)) {
    std::ostringstream where;
    where << "cell (d=" << cell.d << ", k=" << cell.k << ", m=" << cell.m
          << ", alpha=" << cell.alpha << ", kappa=" << cell.kappa << ", solver=" << cell.solver
          << ")";
    if (cell.k < 1) throw ConfigInvalid("k must be positive at " + where.str());
    if (is_bdd_family(cfg.experiment)) {
      if (cell.d < 1 || cell.d % cell.k != 0)
        throw ConfigInvalid("k must divide d at " + where.str());
      if (cell.m < 17 * cell.d) throw ConfigInvalid("need m >= 17 d at " + where.str());
      if (!(cell.alpha > 0.0 && cell.alpha < 0.5))
        throw ConfigInvalid("alpha must be in (0, 1/2) at " + where.str());
      if (!(cell.kappa >= 1.0)) throw ConfigInvalid("kappa must be >= 1 at " + where.str());
      if (cell.solver != "babai") solver_from_name(cell.solver);  // throws on unknown names
    } else {
      if (cell.m < 2) throw ConfigInvalid("clwe dimension must be >= 2 at " + where.str());
      if (cell.solver != "clwe-arm" && cell.solver != "null-arm")
        throw ConfigInvalid("clwe-advantage arms must be clwe-arm or null-arm at " + where.str());
      clwe_dimension_scale(cell.m, cell.k, cfg.clwe_scale_c);  // throws when it overflows
    }
  }
  // derived seeds must be pairwise distinct over the whole grid
  std::unordered_set<std::uint64_t> seen;
  for (const auto& cell : enumerate_cells(cfg))
    for (int t = 0; t < cfg.trials; ++t) {
      const auto seed = derive_trial_seed(cfg, cell.d, cell.k, cell.m, cell.alpha, cell.kappa,
                                          cell.solver, cell.beta_exp, t);
      if (!seen.insert(seed).second) throw ConfigInvalid("derived seed collision");
    }
}

namespace {

void run_bdd_trial(const ExperimentConfig& cfg, const Cell& cell, TrialRecord& rec,
                   RngEngine& rng) {
  const LatticeBasis basis = sample_random_basis(cell.d, cell.kappa, rng);
  const BinaryBddInstance inst = make_binary_bdd(basis, cell.alpha, cfg.noise_ratio, rng);
  rec.kappa_actual = basis.kappa();
  rec.lambda1_bin = *inst.lambda1_bin;
  rec.n = GadgetShape::make(cell.d, cell.k).n();

  switch (cfg.experiment) {
    case ExperimentKind::bdd_completeness: {
      auto [slr, tr] = build_slr_instance(inst, cell.m, cell.k, *inst.lambda1_bin, rng);
      const Eigen::VectorXd planted =
          encode_sign_vector(inst.hidden->z, tr.params.shape).dense();
      rec.residual_mse = residual_mse(slr.x, planted, slr.y);
      rec.prediction_error = 0.0;
      rec.success = rec.residual_mse <= slr.delta * slr.delta;
      break;
    }
    case ExperimentKind::bdd_soundness: {
      auto [slr, tr] = build_slr_instance(inst, cell.m, cell.k, *inst.lambda1_bin, rng);
      const Eigen::VectorXd planted =
          encode_sign_vector(inst.hidden->z, tr.params.shape).dense();
      rec.residual_mse = residual_mse(slr.x, planted, slr.y);
      const double budget = slr.delta * slr.delta;
      bool sound = true;
      const GadgetShape& shape = tr.params.shape;
      for_each_snk_support(shape.n(), shape.k, [&](const std::vector<int>& support) {
        if (!sound) return;
        const PartiteSparseVector candidate{shape.n(), shape.k, support};
        const Eigen::VectorXd theta = candidate.dense();
        if (residual_mse(slr.x, theta, slr.y) <= budget &&
            (decode_partite(candidate, shape).array() != inst.hidden->z.array()).any())
          sound = false;
      });
      rec.success = sound;
      break;
    }
    case ExperimentKind::lasso_vs_kappa:
    case ExperimentKind::babai_vs_lasso: {
      if (cell.solver == "babai") {
        const Eigen::VectorXi z = babai_round(basis, inst.target);
        const bool sign_vector = (z.array().abs() == 1).all();
        rec.success = sign_vector && verify_binary_bdd_solution(inst, z);
        rec.residual_mse =
            (basis.matrix() * z.cast<double>() - inst.target).squaredNorm() / cell.m;
        break;
      }
      auto [slr, tr] = build_slr_instance(inst, cell.m, cell.k, *inst.lambda1_bin, rng);
      const SolveResult sol = solver_from_name(cell.solver)(slr, tr.params.shape);
      const Eigen::VectorXd truncated = threshold_topk(sol.theta, cell.k);
      rec.residual_mse = residual_mse(slr.x, truncated, slr.y);
      rec.prediction_error = prediction_error(
          slr.x, truncated, encode_sign_vector(inst.hidden->z, tr.params.shape).dense());
      const ExtractOutcome out = extract_bdd_solution(truncated, tr);
      rec.success =
          out.status == ExtractStatus::ok && verify_binary_bdd_solution(inst, *out.z);
      break;
    }
    case ExperimentKind::re_trend: {
      auto [slr, tr] = build_slr_instance(inst, cell.m, cell.k, *inst.lambda1_bin, rng);
      auto [x_tilde, z_scale] = column_normalize(slr.x);
      const PartiteSparseVector planted = encode_sign_vector(inst.hidden->z, tr.params.shape);
      std::set<int> support;
      for (int part = 0; part < cell.k; ++part)
        support.insert(static_cast<int>(part * tr.params.shape.block_width()) +
                       planted.support[part]);
      const double eps = static_cast<double>(cell.k) / (50.0 * cell.d);
      const ReEstimate est = re_constant_estimate(x_tilde, support, eps, cfg.re_budget, rng);
      rec.re_estimate = est.value;
      const double md = static_cast<double>(x_tilde.rows());
      const double check =
          (x_tilde * est.witness).squaredNorm() / (md * est.witness.squaredNorm());
      rec.success = in_cone(est.witness, support, eps) && std::abs(check - est.value) <= 1e-9;
      break;
    }
    case ExperimentKind::runtime_vs_k: {
      const BddSolveReport report = reduce_and_solve(
          inst, solver_from_name(cell.solver), cell.solver, cell.m, cell.k,
          Lambda1Mode::doubling, rng);
      rec.success = report.solved;
      rec.residual_mse = report.residual * report.residual / cell.m;
      rec.wall_time_ms = report.wall_time * 1000.0;  // pipeline time, not trial time
      break;
    }
    default:
      throw ConfigInvalid("experiment is not driven by run_bdd_trial");
  }
}

void run_clwe_trial(const ExperimentConfig& cfg, const Cell& cell, TrialRecord& rec,
                    RngEngine& rng) {
  const int m = cell.m;
  const int k = cell.k;
  const long n = clwe_dimension_scale(m, k, cfg.clwe_scale_c);
  const double beta = cfg.clwe_beta_coeff / std::sqrt(static_cast<double>(k));
  rec.n = n;
  const ClweSample sample = cell.solver == "clwe-arm"
                                ? sample_clwe(m, n, cfg.clwe_gamma, beta, rng)
                                : sample_null(m, n, rng);
  const ClweSlrInstance inst = build_slr_from_clwe(sample, k);
  const SolveResult sol = l0_bruteforce_partite(inst.slr.x, inst.slr.y, k);
  rec.residual_mse = residual_mse(inst.slr.x, sol.theta, inst.slr.y);
  rec.success = distinguish(sample, sol.theta) == 1;
}

TrialRecord run_trial(const ExperimentConfig& cfg, const Cell& cell, int trial) {
  TrialRecord rec;
  rec.experiment = to_string(cfg.experiment);
  rec.d = cell.d;
  rec.k = cell.k;
  rec.m = cell.m;
  rec.alpha = cell.alpha;
  rec.kappa_target = cell.kappa;
  rec.solver = cell.solver;
  rec.trial = trial;
  rec.seed = derive_trial_seed(cfg, cell.d, cell.k, cell.m, cell.alpha, cell.kappa, cell.solver,
                               cell.beta_exp, trial);
  RngEngine rng = make_engine(rec.seed);
  const auto start = std::chrono::steady_clock::now();
  try {
    if (is_bdd_family(cfg.experiment))
      run_bdd_trial(cfg, cell, rec, rng);
    else
      run_clwe_trial(cfg, cell, rec, rng);
  } catch (const std::exception&) {
    rec.success = false;  // partial failures stay in the record stream
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (cfg.experiment != ExperimentKind::runtime_vs_k) rec.wall_time_ms = elapsed * 1000.0;
  if (elapsed > cfg.trial_timeout_s) {
    rec.timed_out = true;
    rec.success = false;
  }
  if (!cfg.record_wall_time) rec.wall_time_ms = 0.0;
  return rec;
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  const int worker_count = std::min<int>(jobs, static_cast<int>(count));
  workers.reserve(worker_count);
  for (int w = 0; w < worker_count; ++w)
    workers.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : workers) t.join();
}

}  // namespace

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const std::vector<Cell> cells = enumerate_cells(cfg);
  std::vector<TrialRecord> records(cells.size() * static_cast<std::size_t>(cfg.trials));
  parallel_for(records.size(), cfg.jobs, [&](std::size_t i) {
    const Cell& cell = cells[i / cfg.trials];
    records[i] = run_trial(cfg, cell, static_cast<int>(i % cfg.trials));
  });
  return records;
}

namespace {

constexpr const char* kCsvHeader =
    "experiment,d,k,m,n,alpha,kappa_target,kappa_actual,lambda1_bin,solver,trial,seed,success,"
    "residual_mse,prediction_error,re_estimate,wall_time_ms";

}  // namespace

void emit_csv(const std::vector<TrialRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path);
  out << kCsvHeader << "\n";
  for (const auto& r : records) {
    out << r.experiment << ',' << r.d << ',' << r.k << ',' << r.m << ',' << r.n << ','
        << double_to_string(r.alpha) << ',' << double_to_string(r.kappa_target) << ','
        << double_to_string(r.kappa_actual) << ',' << double_to_string(r.lambda1_bin) << ','
        << r.solver << ',' << r.trial << ',' << r.seed << ',' << (r.success ? 1 : 0) << ','
        << double_to_string(r.residual_mse) << ',' << double_to_string(r.prediction_error) << ','
        << double_to_string(r.re_estimate) << ',' << double_to_string(r.wall_time_ms) << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<TrialRecord> parse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw IoError("unexpected CSV header");
  std::vector<TrialRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 17) throw IoError("malformed CSV row");
    TrialRecord r;
    r.experiment = fields[0];
    r.d = std::stoi(fields[1]);
    r.k = std::stoi(fields[2]);
    r.m = std::stoi(fields[3]);
    r.n = std::stol(fields[4]);
    r.alpha = double_from_string(fields[5]);
    r.kappa_target = double_from_string(fields[6]);
    r.kappa_actual = double_from_string(fields[7]);
    r.lambda1_bin = double_from_string(fields[8]);
    r.solver = fields[9];
    r.trial = std::stoi(fields[10]);
    r.seed = std::stoull(fields[11]);
    r.success = fields[12] == "1";
    r.residual_mse = double_from_string(fields[13]);
    r.prediction_error = double_from_string(fields[14]);
    r.re_estimate = double_from_string(fields[15]);
    r.wall_time_ms = double_from_string(fields[16]);
    records.push_back(std::move(r));
  }
  return records;
}

namespace {

json record_to_json(const TrialRecord& r) {
  return json{{"experiment", r.experiment},
              {"d", r.d},
              {"k", r.k},
              {"m", r.m},
              {"n", r.n},
              {"alpha", double_to_string(r.alpha)},
              {"kappa_target", double_to_string(r.kappa_target)},
              {"kappa_actual", double_to_string(r.kappa_actual)},
              {"lambda1_bin", double_to_string(r.lambda1_bin)},
              {"solver", r.solver},
              {"trial", r.trial},
              {"seed", r.seed},
              {"success", r.success},
              {"residual_mse", double_to_string(r.residual_mse)},
              {"prediction_error", double_to_string(r.prediction_error)},
              {"re_estimate", double_to_string(r.re_estimate)},
              {"wall_time_ms", double_to_string(r.wall_time_ms)},
              {"timed_out", r.timed_out}};
}

}  // namespace

void emit_json(const std::vector<TrialRecord>& records, const std::string& path) {
  json arr = json::array();
  for (const auto& r : records) arr.push_back(record_to_json(r));
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path);
  out << arr.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  return json{{"experiment", to_string(cfg.experiment)},
              {"d", cfg.d},
              {"k", cfg.k},
              {"m", cfg.m},
              {"alpha", cfg.alpha},
              {"kappa_target", cfg.kappa_target},
              {"solver", cfg.solver},
              {"beta_exponent", cfg.beta_exponent},
              {"trials", cfg.trials},
              {"master_seed", cfg.master_seed},
              {"noise_ratio", cfg.noise_ratio},
              {"record_wall_time", cfg.record_wall_time},
              {"trial_timeout_s", cfg.trial_timeout_s},
              {"jobs", cfg.jobs},
              {"re_budget", cfg.re_budget},
              {"clwe_gamma", cfg.clwe_gamma},
              {"clwe_beta_coeff", cfg.clwe_beta_coeff},
              {"clwe_scale_c", cfg.clwe_scale_c}};
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.experiment = experiment_kind_from_string(j.at("experiment").get<std::string>());
  if (j.contains("d")) cfg.d = j.at("d").get<std::vector<int>>();
  if (j.contains("k")) cfg.k = j.at("k").get<std::vector<int>>();
  if (j.contains("m")) cfg.m = j.at("m").get<std::vector<int>>();
  if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<std::vector<double>>();
  if (j.contains("kappa_target"))
    cfg.kappa_target = j.at("kappa_target").get<std::vector<double>>();
  if (j.contains("solver")) cfg.solver = j.at("solver").get<std::vector<std::string>>();
  if (j.contains("beta_exponent"))
    cfg.beta_exponent = j.at("beta_exponent").get<std::vector<double>>();
  if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
  if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("noise_ratio")) cfg.noise_ratio = j.at("noise_ratio").get<double>();
  if (j.contains("record_wall_time"))
    cfg.record_wall_time = j.at("record_wall_time").get<bool>();
  if (j.contains("trial_timeout_s")) cfg.trial_timeout_s = j.at("trial_timeout_s").get<double>();
  if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<int>();
  if (j.contains("re_budget")) cfg.re_budget = j.at("re_budget").get<int>();
  if (j.contains("clwe_gamma")) cfg.clwe_gamma = j.at("clwe_gamma").get<double>();
  if (j.contains("clwe_beta_coeff"))
    cfg.clwe_beta_coeff = j.at("clwe_beta_coeff").get<double>();
  if (j.contains("clwe_scale_c")) cfg.clwe_scale_c = j.at("clwe_scale_c").get<double>();
  return cfg;
}

namespace {

constexpr int kSchemaVersion = 1;

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void save_wrapped(const std::string& path, const std::string& kind, const json& payload) {
  json wrapper{{"schema_version", kSchemaVersion},
               {"kind", kind},
               {"payload", payload},
               {"hash", hash_hex(fnv1a64(payload.dump()))}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path);
  out << wrapper.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

json load_wrapped(const std::string& path, const std::string& kind) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json wrapper;
  try {
    in >> wrapper;
  } catch (const json::exception& e) {
    throw IoError("cannot parse " + path + ": " + e.what());
  }
  if (!wrapper.contains("schema_version") || wrapper.at("schema_version").get<int>() != kSchemaVersion)
    throw SchemaVersionUnsupported("unsupported schema version in " + path);
  if (wrapper.at("kind").get<std::string>() != kind)
    throw IoError("expected kind " + kind + " in " + path);
  const json payload = wrapper.at("payload");
  if (hash_hex(fnv1a64(payload.dump())) != wrapper.at("hash").get<std::string>())
    throw HashMismatch("content hash mismatch in " + path);
  return payload;
}

}  // namespace

void save_bdd_instance(const std::string& path, const BinaryBddInstance& inst) {
  save_wrapped(path, "bdd-instance", bdd_instance_to_json(inst));
}
BinaryBddInstance load_bdd_instance(const std::string& path) {
  return bdd_instance_from_json(load_wrapped(path, "bdd-instance"));
}
void save_slr_instance(const std::string& path, const SlrInstance& inst) {
  save_wrapped(path, "slr-instance", slr_instance_to_json(inst));
}
SlrInstance load_slr_instance(const std::string& path) {
  return slr_instance_from_json(load_wrapped(path, "slr-instance"));
}
void save_transcript(const std::string& path, const ReductionTranscript& tr) {
  save_wrapped(path, "reduction-transcript", transcript_to_json(tr));
}
ReductionTranscript load_transcript(const std::string& path) {
  return transcript_from_json(load_wrapped(path, "reduction-transcript"));
}
void save_clwe_sample(const std::string& path, const ClweSample& sample, bool include_secrets) {
  save_wrapped(path, "clwe-sample", clwe_sample_to_json(sample, include_secrets));
}
ClweSample load_clwe_sample(const std::string& path) {
  return clwe_sample_from_json(load_wrapped(path, "clwe-sample"));
}

void emit_plot_script(ExperimentKind kind, const std::string& csv_path,
                      const std::string& out_path) {
  std::ofstream out(out_path);
  if (!out) throw IoError("cannot open " + out_path);
  out << "#!/usr/bin/env python3\n"
         "# Plots the '" << to_string(kind) << "' experiment CSV. Regenerate freely.\n"
         "import csv, math, sys\n"
         "import matplotlib\n"
         "matplotlib.use('Agg')\n"
         "import matplotlib.pyplot as plt\n"
         "\n"
         "path = sys.argv[1] if len(sys.argv) > 1 else "
      << json(csv_path).dump() << "\n"
      << "rows = list(csv.DictReader(open(path)))\n"
         "def fl(r, key):\n"
         "    return float(r[key])\n"
         "def group(rows, key):\n"
         "    out = {}\n"
         "    for r in rows:\n"
         "        out.setdefault(r[key], []).append(r)\n"
         "    return dict(sorted(out.items(), key=lambda kv: float(kv[0]) if kv[0].replace('.','',1).replace('-','',1).isdigit() else kv[0]))\n"
         "def rate(rs):\n"
         "    return sum(int(r['success']) for r in rs) / len(rs)\n"
         "def median(vals):\n"
         "    vals = sorted(vals)\n"
         "    n = len(vals)\n"
         "    return vals[n//2] if n % 2 else 0.5*(vals[n//2-1]+vals[n//2])\n"
         "fig, ax = plt.subplots(figsize=(6, 4))\n";
  switch (kind) {
    case ExperimentKind::lasso_vs_kappa:
    case ExperimentKind::babai_vs_lasso:
      out << "for solver, rs in group(rows, 'solver').items():\n"
             "    by_kappa = group(rs, 'kappa_target')\n"
             "    ax.plot([float(k) for k in by_kappa], [rate(v) for v in by_kappa.values()],\n"
             "            marker='o', label=solver)\n"
             "ax.set_xscale('log')\n"
             "ax.set_xlabel('condition number target')\n"
             "ax.set_ylabel('success rate')\n"
             "ax.legend()\n";
      break;
    case ExperimentKind::re_trend:
      out << "by_kappa = group(rows, 'kappa_target')\n"
             "ax.plot([float(k) for k in by_kappa],\n"
             "        [median([fl(r, 're_estimate') for r in v]) for v in by_kappa.values()],\n"
             "        marker='o')\n"
             "ax.set_xscale('log')\n"
             "ax.set_yscale('log')\n"
             "ax.set_xlabel('condition number target')\n"
             "ax.set_ylabel('median restricted-eigenvalue estimate')\n";
      break;
    case ExperimentKind::runtime_vs_k:
      out << "by_k = group(rows, 'k')\n"
             "xs = [int(r[0]['d']) / int(k) for k, r in by_k.items()]\n"
             "ys = [median([fl(r, 'wall_time_ms') for r in v]) for v in by_k.values()]\n"
             "ax.plot(xs, ys, marker='o')\n"
             "ax.set_yscale('log')\n"
             "ax.set_xlabel('d / k')\n"
             "ax.set_ylabel('median pipeline wall time (ms)')\n";
      break;
    case ExperimentKind::clwe_advantage:
      out << "by_arm = group(rows, 'solver')\n"
             "ax.bar(list(by_arm), [rate(v) for v in by_arm.values()])\n"
             "ax.set_ylabel('fraction of trials reporting 1')\n";
      break;
    default:
      out << "by_alpha = group(rows, 'alpha')\n"
             "ax.plot([float(a) for a in by_alpha], [rate(v) for v in by_alpha.values()],\n"
             "        marker='o')\n"
             "ax.set_xlabel('alpha')\n"
             "ax.set_ylabel('success rate')\n";
      break;
  }
  out << "ax.set_title(" << json(to_string(kind)).dump() << ")\n"
      << "fig.tight_layout()\n"
         "fig.savefig(path.rsplit('.', 1)[0] + '.png', dpi=150)\n";
  if (!out) throw IoError("write failed: " + out_path);
}

}  // namespace latreg
