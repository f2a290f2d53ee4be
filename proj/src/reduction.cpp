#include "latreg/reduction.hpp"

#include "latreg/errors.hpp"
#include "latreg/hashing.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace latreg {

std::vector<double> estimate_lambda1_hat(const LatticeBasis& basis, Lambda1Mode mode) {
  if (mode == Lambda1Mode::exact) return {lambda1_bin_exact(basis)};
  std::vector<double> candidates;
  const double stop = 2.0 * basis.sigma_max();
  for (double c = basis.sigma_min(); c <= stop; c *= 2.0) candidates.push_back(c);
  return candidates;
}

ReductionParams compute_reduction_params(const LatticeBasis& basis, int m, int k,
                                         double lambda1_hat) {
  const int d = basis.dim();
  if (k < 1 || d % k != 0) throw BadShape("k must divide d");
  if (m < 17 * d) throw BadShape("need m >= 17 d");
  if (!(lambda1_hat > 0.0)) throw PreconditionViolated("lambda1_hat must be positive");
  ReductionParams p;
  p.shape = GadgetShape::make(d, k);
  p.m = m;
  p.m1 = m - k;
  p.lambda1_hat = lambda1_hat;
  p.delta = std::sqrt(3.0 * p.m1 * lambda1_hat * lambda1_hat / (100.0 * m));
  p.gamma = std::max(3.0 * p.delta * std::sqrt(static_cast<double>(m)),
                     100.0 * basis.sigma_max() * p.delta *
                         std::sqrt(static_cast<double>(d) * m) /
                         (std::sqrt(static_cast<double>(k)) * lambda1_hat));
  return p;
}

namespace {

/// Shared assembly path: build and rebuild must run the exact same
/// floating-point operations for transcripts to reproduce instances
/// bit-for-bit.
SlrInstance assemble_instance(const LatticeBasis& basis, const Eigen::VectorXd& target,
                              ReductionParams& params, const Eigen::MatrixXd& gaussian_rows,
                              const Eigen::VectorXd& flood_noise,
                              const Eigen::MatrixXd* rb_cache = nullptr) {
  const GadgetShape& shape = params.shape;
  const int k = shape.k;
  const long bw = shape.block_width();
  const int bh = shape.block_height();
  const long n = shape.n();

  // rb_cache, when given, must equal gaussian_rows * basis.matrix() bit for bit
  const Eigen::MatrixXd rb = rb_cache ? *rb_cache : gaussian_rows * basis.matrix();
  const Eigen::MatrixXd h = gadget_block(shape);

  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(params.m, n);
  for (int i = 0; i < k; ++i)
    x.block(0, static_cast<Eigen::Index>(i) * bw, params.m1, bw) =
        rb.middleCols(static_cast<Eigen::Index>(i) * bh, bh) * h;
  for (int i = 0; i < k; ++i)
    x.block(params.m1 + i, static_cast<Eigen::Index>(i) * bw, 1, bw)
        .setConstant(params.gamma);

  Eigen::VectorXd y(params.m);
  y.head(params.m1) = gaussian_rows * target;
  y.tail(k).setConstant(params.gamma);
  if (flood_noise.size() > 0) y += flood_noise;

  double max_col = 0.0;
  for (long j = 0; j < n; ++j) max_col = std::max(max_col, x.col(j).norm());
  params.z_scale = max_col / std::sqrt(static_cast<double>(params.m));

  SlrInstance inst;
  inst.x = std::move(x);
  inst.y = std::move(y);
  inst.delta = params.delta;
  inst.k = k;
  inst.provenance = "from-bdd";
  return inst;
}

std::pair<SlrInstance, ReductionTranscript> build_impl(const BinaryBddInstance& inst, int m,
                                                       int k, double lambda1_hat,
                                                       std::optional<double> flood_sigma,
                                                       RngEngine& rng) {
  ReductionTranscript tr;
  tr.params = compute_reduction_params(inst.basis, m, k, lambda1_hat);
  tr.gaussian_rows = normal_matrix(tr.params.m1, inst.basis.dim(), rng);
  if (flood_sigma) {
    tr.sigma_flood = *flood_sigma;
    tr.flood_noise = *flood_sigma * normal_vector(m, rng);
  }
  tr.basis_hash = content_hash(inst.basis.matrix());
  tr.target_hash = content_hash(inst.target);
  SlrInstance slr = assemble_instance(inst.basis, inst.target, tr.params, tr.gaussian_rows,
                                      tr.flood_noise);
  return {std::move(slr), std::move(tr)};
}

std::pair<SlrInstance, ReductionTranscript> build_with_rows(const BinaryBddInstance& inst,
                                                            int m, int k, double lambda1_hat,
                                                            const Eigen::MatrixXd& gaussian_rows,
                                                            const Eigen::MatrixXd& rb_cache) {
  ReductionTranscript tr;
  tr.params = compute_reduction_params(inst.basis, m, k, lambda1_hat);
  tr.gaussian_rows = gaussian_rows;
  tr.basis_hash = content_hash(inst.basis.matrix());
  tr.target_hash = content_hash(inst.target);
  SlrInstance slr = assemble_instance(inst.basis, inst.target, tr.params, tr.gaussian_rows,
                                      tr.flood_noise, &rb_cache);
  return {std::move(slr), std::move(tr)};
}

}  // namespace

std::pair<SlrInstance, ReductionTranscript> build_slr_instance(const BinaryBddInstance& inst,
                                                               int m, int k, double lambda1_hat,
                                                               RngEngine& rng) {
  return build_impl(inst, m, k, lambda1_hat, std::nullopt, rng);
}

std::pair<SlrInstance, ReductionTranscript> flood_noise_instance(const BinaryBddInstance& inst,
                                                                 int m, int k, double lambda1_hat,
                                                                 double sigma, RngEngine& rng) {
  if (sigma < 0.0) throw PreconditionViolated("sigma must be nonnegative");
  return build_impl(inst, m, k, lambda1_hat, sigma, rng);
}

SlrInstance rebuild_from_transcript(const ReductionTranscript& transcript,
                                    const LatticeBasis& basis, const Eigen::VectorXd& target) {
  if (content_hash(basis.matrix()) != transcript.basis_hash)
    throw HashMismatch("basis does not match the transcript");
  if (content_hash(target) != transcript.target_hash)
    throw HashMismatch("target does not match the transcript");
  ReductionParams params = transcript.params;
  return assemble_instance(basis, target, params, transcript.gaussian_rows,
                           transcript.flood_noise);
}

ExtractOutcome extract_bdd_solution(const Eigen::VectorXd& theta_hat,
                                    const ReductionTranscript& transcript) {
  const GadgetShape& shape = transcript.params.shape;
  if (theta_hat.size() != shape.n()) throw BadShape("theta length != n");
  long nonzeros = 0;
  for (Eigen::Index i = 0; i < theta_hat.size(); ++i)
    if (theta_hat[i] != 0.0) ++nonzeros;
  if (nonzeros > shape.k) return {ExtractStatus::not_k_sparse, std::nullopt};

  const Eigen::VectorXi rounded = round_vector(theta_hat);
  const long bw = shape.block_width();
  PartiteSparseVector theta{shape.n(), shape.k, std::vector<int>(shape.k, -1)};
  for (int part = 0; part < shape.k; ++part) {
    for (long j = 0; j < bw; ++j) {
      const int v = rounded[static_cast<Eigen::Index>(part) * bw + j];
      if (v == 0) continue;
      if (v != 1 || theta.support[part] >= 0)
        return {ExtractStatus::not_partite, std::nullopt};
      theta.support[part] = static_cast<int>(j);
    }
    if (theta.support[part] < 0) return {ExtractStatus::not_partite, std::nullopt};
  }
  return {ExtractStatus::ok, decode_partite(theta, shape)};
}

BddSolveReport reduce_and_solve(const BinaryBddInstance& inst, const SlrSolver& solver,
                                const std::string& method_label, int m, int k, Lambda1Mode mode,
                                RngEngine& rng) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  BddSolveReport report;
  report.method = method_label;
  report.residual = std::numeric_limits<double>::infinity();

  // one draw of the Gaussian rows; the search only rescales delta and gamma
  const Eigen::MatrixXd gaussian_rows = normal_matrix(m - k, inst.basis.dim(), rng);
  const Eigen::MatrixXd rb = gaussian_rows * inst.basis.matrix();
  for (double lambda1_hat : estimate_lambda1_hat(inst.basis, mode)) {
    auto [slr, transcript] = build_with_rows(inst, m, k, lambda1_hat, gaussian_rows, rb);
    SolveResult sol;
    try {
      sol = solver(slr, transcript.params.shape);
    } catch (const std::exception&) {
      continue;  // a failing solver never aborts the search
    }
    const ExtractOutcome extracted = extract_bdd_solution(
        threshold_topk(sol.theta, k), transcript);
    Eigen::VectorXd decoded;
    if (extracted.status == ExtractStatus::ok) {
      decoded = extracted.z->cast<double>();
    } else {
      // fall back to the raw decoded integer point for residual reporting
      const Eigen::VectorXi rounded = round_vector(sol.theta);
      decoded = g_sparse_times(transcript.params.shape, rounded.cast<double>());
    }
    const double residual = (inst.basis.matrix() * decoded - inst.target).norm();
    if (residual < report.residual) report.residual = residual;
    if (extracted.status == ExtractStatus::ok &&
        verify_binary_bdd_solution(inst, *extracted.z)) {
      report.solved = true;
      report.z_hat = extracted.z;
      report.residual = residual;
      report.wall_time = elapsed();
      return report;
    }
  }
  report.wall_time = elapsed();
  return report;
}

std::pair<Eigen::MatrixXd, double> column_normalize(const Eigen::MatrixXd& x) {
  double max_col = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) max_col = std::max(max_col, x.col(j).norm());
  if (max_col == 0.0) throw ZeroMatrix("all columns are zero");
  const double z = max_col / std::sqrt(static_cast<double>(x.rows()));
  return {x / z, z};
}

double flooding_tv_bound(double b, double sigma) {
  if (b < 0.0 || !(sigma > 0.0)) throw PreconditionViolated("need b >= 0 and sigma > 0");
  return std::min(1.0, b / (2.0 * sigma));
}

SlrSolver make_l0_partite_solver() {
  return [](const SlrInstance& inst, const GadgetShape&) {
    return l0_bruteforce_partite(inst.x, inst.y, inst.k);
  };
}

SlrSolver make_l0_general_solver() {
  return [](const SlrInstance& inst, const GadgetShape&) {
    return l0_bruteforce_general(inst.x, inst.y, inst.k);
  };
}

SlrSolver make_thresholded_lasso_solver(double epsilon_cone) {
  return [epsilon_cone](const SlrInstance& inst, const GadgetShape&) {
    auto [x_tilde, z] = column_normalize(inst.x);
    return thresholded_lasso(x_tilde, inst.y / z, inst.k, epsilon_cone, std::nullopt);
  };
}

}  // namespace latreg
