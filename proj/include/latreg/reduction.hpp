#pragma once

#include "latreg/gadgets.hpp"
#include "latreg/lattice.hpp"
#include "latreg/rng.hpp"
#include "latreg/solvers.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace latreg {

struct ReductionParams {
  double lambda1_hat = 0.0;
  double delta = 0.0;  // delta^2 = 3 m1 lambda1_hat^2 / (100 m)
  double gamma = 0.0;  // max(3 delta sqrt(m), 100 sigma_max delta sqrt(dm) / (sqrt(k) lambda1_hat))
  double z_scale = 0.0;  // max column norm of X divided by sqrt(m)
  int m = 0;
  int m1 = 0;  // m - k Gaussian rows
  GadgetShape shape;
};

struct SlrInstance {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  double delta = 0.0;
  int k = 0;
  std::string provenance;  // from-bdd | from-clwe | synthetic
};

/// Everything the randomized reduction fixed, sufficient to rebuild the
/// instance bit-for-bit and to map a regression solution back.
struct ReductionTranscript {
  ReductionParams params;
  Eigen::MatrixXd gaussian_rows;      // R, m1 x d
  Eigen::VectorXd flood_noise;        // xi, length m; empty when none was added
  double sigma_flood = 0.0;
  std::uint64_t rng_seed = 0;
  std::uint64_t basis_hash = 0;
  std::uint64_t target_hash = 0;
};

enum class Lambda1Mode { exact, doubling };

/// Candidate values for the lambda1_bin estimate. Exact mode yields the
/// enumerated value itself; doubling mode yields sigma_min * 2^i up to
/// 2 sigma_max, which brackets lambda1_bin by the sandwich bounds.
std::vector<double> estimate_lambda1_hat(const LatticeBasis& basis, Lambda1Mode mode);

ReductionParams compute_reduction_params(const LatticeBasis& basis, int m, int k,
                                         double lambda1_hat);

/// X = (R B G_sparse ; gamma G_partite), y = (R t ; gamma 1).
std::pair<SlrInstance, ReductionTranscript> build_slr_instance(const BinaryBddInstance& inst,
                                                               int m, int k, double lambda1_hat,
                                                               RngEngine& rng);

/// Same construction with iid N(0, sigma^2) noise added to y.
std::pair<SlrInstance, ReductionTranscript> flood_noise_instance(const BinaryBddInstance& inst,
                                                                 int m, int k, double lambda1_hat,
                                                                 double sigma, RngEngine& rng);

/// Reassembles the instance from a transcript; bit-identical to the original.
SlrInstance rebuild_from_transcript(const ReductionTranscript& transcript,
                                    const LatticeBasis& basis, const Eigen::VectorXd& target);

enum class ExtractStatus { ok, not_k_sparse, not_partite };

struct ExtractOutcome {
  ExtractStatus status = ExtractStatus::ok;
  std::optional<Eigen::VectorXi> z;  // set when status == ok
};

/// Rounds theta entrywise; when the rounding lands in S_{n,k} the decoded
/// sign vector is returned.
ExtractOutcome extract_bdd_solution(const Eigen::VectorXd& theta_hat,
                                    const ReductionTranscript& transcript);

using SlrSolver = std::function<SolveResult(const SlrInstance&, const GadgetShape&)>;

/// Full pipeline: for each lambda1_hat candidate build, solve, extract and
/// verify; the first verified solution wins, otherwise the report carries the
/// best decoded residual seen.
BddSolveReport reduce_and_solve(const BinaryBddInstance& inst, const SlrSolver& solver,
                                const std::string& method_label, int m, int k, Lambda1Mode mode,
                                RngEngine& rng);

/// X_tilde = X / Z with Z = max_i ||col_i(X)|| / sqrt(m), so every column of
/// X_tilde has norm at most sqrt(m) with equality for the largest.
std::pair<Eigen::MatrixXd, double> column_normalize(const Eigen::MatrixXd& x);

/// min(1, b / (2 sigma)): total-variation bound for mean-b Gaussian flooding.
double flooding_tv_bound(double b, double sigma);

SlrSolver make_l0_partite_solver();
SlrSolver make_l0_general_solver();
SlrSolver make_thresholded_lasso_solver(double epsilon_cone = 1.0);

}  // namespace latreg
