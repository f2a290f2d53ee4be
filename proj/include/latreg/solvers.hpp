#pragma once

#include "latreg/rng.hpp"

#include <Eigen/Core>

#include <optional>
#include <set>
#include <vector>

namespace latreg {

struct LassoConfig {
  double lambda_reg = 0.0;
  int max_sweeps = 10000;
  double tol = 1e-8;  // convergence threshold on max coordinate change
  std::optional<Eigen::VectorXd> warm_start;
};

struct SolveResult {
  Eigen::VectorXd theta;
  double objective = 0.0;  // (1/2m)||y - X theta||^2 + lambda ||theta||_1
  int sweeps_used = 0;
  bool converged = true;
  std::vector<double> objective_trace;  // per-sweep, coordinate descent only
};

/// Cyclic coordinate descent with exact univariate soft-threshold updates on
/// (1/2m)||y - X theta||^2 + lambda ||theta||_1.
SolveResult lasso_coordinate_descent(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                     const LassoConfig& cfg);

/// Keeps the k entries of largest magnitude (ties to the lower index).
Eigen::VectorXd threshold_topk(const Eigen::VectorXd& theta, int k);

/// Lasso followed by top-k truncation. With a known noise-norm bound the
/// regularization weight is set from the (2+eps)/eps floor; otherwise a
/// geometric grid of 25 weights is swept and the truncated iterate with the
/// least residual wins. Expects column-normalized input.
SolveResult thresholded_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int k,
                              double epsilon_cone, std::optional<double> noise_norm_bound);

/// ((2+eps)/eps) * ||X^T w / m||_inf.
double lasso_lambda_floor(const Eigen::MatrixXd& x_tilde, const Eigen::VectorXd& w_tilde,
                          double epsilon);

/// Exact minimizer of ||X theta - y|| over theta in S_{n,k} (binary, one 1
/// per block); ties broken lexicographically on the support.
SolveResult l0_bruteforce_partite(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int k);

/// Exact k-sparse least-squares minimizer over all supports, each solved via
/// a column-pivoting QR factorization.
SolveResult l0_bruteforce_general(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int k);

double prediction_error(const Eigen::MatrixXd& x, const Eigen::VectorXd& theta_hat,
                        const Eigen::VectorXd& theta_star);
double residual_mse(const Eigen::MatrixXd& x, const Eigen::VectorXd& theta_hat,
                    const Eigen::VectorXd& y);

/// Sampled upper estimate of the restricted eigenvalue over the cone
/// C_eps(S) = { v : ||v restricted off S||_1 <= (1+eps) ||v on S||_1 }.
/// The reported value is witnessed by a stored cone member.
struct ReEstimate {
  double value = 0.0;
  Eigen::VectorXd witness;
};

ReEstimate re_constant_estimate(const Eigen::MatrixXd& x_tilde, const std::set<int>& support,
                                double epsilon, int budget, RngEngine& rng);

bool in_cone(const Eigen::VectorXd& v, const std::set<int>& support, double epsilon,
             double tol = 1e-12);

/// Given nonnegative x, y with sum(x) + sum(y) = 1 and sum(y) <= (1+eps)sum(x),
/// finds an index with x_i >= eps/k and y_i <= (1+10 eps) x_i. Returns nullopt
/// only if no index qualifies, which the hypotheses rule out.
std::optional<int> averaging_split_check(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                         double epsilon);

}  // namespace latreg
