#include "latreg/solvers.hpp"

#include "latreg/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace latreg {

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

double lasso_objective(const Eigen::VectorXd& residual, const Eigen::VectorXd& theta,
                       double lambda, double m) {
  return 0.5 * residual.squaredNorm() / m + lambda * theta.lpNorm<1>();
}

}  // namespace

SolveResult lasso_coordinate_descent(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                     const LassoConfig& cfg) {
  if (cfg.lambda_reg < 0 || cfg.tol <= 0 || cfg.max_sweeps < 1)
    throw PreconditionViolated("invalid lasso configuration");
  const Eigen::Index m = x.rows(), n = x.cols();
  if (y.size() != m) throw BadShape("y length != rows of X");
  const double md = static_cast<double>(m);

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
  if (cfg.warm_start) {
    if (cfg.warm_start->size() != n) throw BadShape("warm start length != n");
    theta = *cfg.warm_start;
  }
  Eigen::VectorXd colsq(n);
  for (Eigen::Index j = 0; j < n; ++j) colsq[j] = x.col(j).squaredNorm();

  Eigen::VectorXd residual = y - x * theta;
  SolveResult out;
  out.converged = false;
  int sweep = 0;
  for (; sweep < cfg.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (colsq[j] == 0.0) continue;
      const double rho = x.col(j).dot(residual) / md + colsq[j] / md * theta[j];
      const double next = soft_threshold(rho, cfg.lambda_reg) / (colsq[j] / md);
      const double change = next - theta[j];
      if (change != 0.0) {
        residual -= change * x.col(j);
        theta[j] = next;
        max_change = std::max(max_change, std::abs(change));
      }
    }
    if ((sweep & 63) == 63) residual = y - x * theta;  // undo accumulated drift
    out.objective_trace.push_back(lasso_objective(residual, theta, cfg.lambda_reg, md));
    if (max_change < cfg.tol) {
      out.converged = true;
      ++sweep;
      break;
    }
  }
  residual = y - x * theta;
  out.theta = std::move(theta);
  out.objective = lasso_objective(residual, out.theta, cfg.lambda_reg, md);
  out.sweeps_used = sweep;
  return out;
}

Eigen::VectorXd threshold_topk(const Eigen::VectorXd& theta, int k) {
  const Eigen::Index n = theta.size();
  if (k > n) throw PreconditionViolated("k exceeds dimension");
  if (k == n) return theta;
  std::vector<Eigen::Index> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                    [&](Eigen::Index a, Eigen::Index b) {
                      const double fa = std::abs(theta[a]), fb = std::abs(theta[b]);
                      return fa != fb ? fa > fb : a < b;
                    });
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < k; ++i) out[idx[i]] = theta[idx[i]];
  return out;
}

double lasso_lambda_floor(const Eigen::MatrixXd& x_tilde, const Eigen::VectorXd& w_tilde,
                          double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 2.0)) throw PreconditionViolated("epsilon must be in (0, 2]");
  if (w_tilde.size() != x_tilde.rows()) throw BadShape("w length != rows of X");
  const double inf_norm = (x_tilde.transpose() * w_tilde).lpNorm<Eigen::Infinity>() /
                          static_cast<double>(x_tilde.rows());
  return (2.0 + epsilon) / epsilon * inf_norm;
}

SolveResult thresholded_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int k,
                              double epsilon_cone, std::optional<double> noise_norm_bound) {
  if (!(epsilon_cone > 0.0 && epsilon_cone <= 2.0))
    throw PreconditionViolated("epsilon must be in (0, 2]");
  const Eigen::Index m = x.rows(), n = x.cols();
  if (k < 0 || k > n) throw PreconditionViolated("k out of range");
  const double md = static_cast<double>(m);

  std::vector<double> lambdas;
  if (noise_norm_bound) {
    // ||X^T w / m||_inf <= ||w|| / sqrt(m) for column-normalized X
    lambdas.push_back((2.0 + epsilon_cone) / epsilon_cone * *noise_norm_bound / std::sqrt(md));
  } else {
    const double base = (x.transpose() * y).lpNorm<Eigen::Infinity>() / md;
    if (base == 0.0) {
      SolveResult out;
      out.theta = Eigen::VectorXd::Zero(n);
      out.objective = 0.5 * y.squaredNorm() / md;
      return out;
    }
    constexpr int kGridSize = 25;
    for (int i = 0; i < kGridSize; ++i) {
      // geometric from base down to 1e-4 * base, largest first for warm starts
      const double t = static_cast<double>(i) / (kGridSize - 1);
      lambdas.push_back(base * std::pow(1e-4, t));
    }
  }

  SolveResult best;
  double best_residual = std::numeric_limits<double>::infinity();
  std::optional<Eigen::VectorXd> warm;
  for (double lambda : lambdas) {
    LassoConfig cfg;
    cfg.lambda_reg = lambda;
    cfg.warm_start = warm;
    SolveResult sol = lasso_coordinate_descent(x, y, cfg);
    warm = sol.theta;
    const Eigen::VectorXd truncated = threshold_topk(sol.theta, k);
    const double res = (x * truncated - y).norm();
    if (res < best_residual) {
      best_residual = res;
      best = sol;
      best.theta = truncated;
      best.objective = 0.5 * res * res / md + lambda * truncated.lpNorm<1>();
    }
  }
  return best;
}

SolveResult l0_bruteforce_partite(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int k) {
  const Eigen::Index m = x.rows(), n = x.cols();
  if (k < 1 || n % k != 0) throw BadShape("k must divide n");
  if (y.size() != m) throw BadShape("y length != rows of X");
  const long bw = n / k;
  if (static_cast<double>(k) * std::log(static_cast<double>(bw)) > std::log(1e7))
    throw SearchSpaceTooLarge("(n/k)^k exceeds the 1e7 budget");

  // cost(support) = ||y||^2 + sum_i (||c_i||^2 - 2<c_i, y>) + 2 sum_{a<b} <c_a, c_b>
  Eigen::VectorXd lin(n);
  for (Eigen::Index j = 0; j < n; ++j) lin[j] = x.col(j).squaredNorm() - 2.0 * x.col(j).dot(y);

  std::vector<int> support(k, 0), best_support(k, 0);
  double best_cost = std::numeric_limits<double>::infinity();

  if (k == 1) {
    for (long j = 0; j < bw; ++j)
      if (lin[j] < best_cost) {
        best_cost = lin[j];
        best_support[0] = static_cast<int>(j);
      }
  } else {
    // pairwise terms in one product: gram(r, c) = <col r, col c> for r in the
    // first k-1 parts and all c
    const Eigen::MatrixXd gram =
        x.leftCols(n - bw).transpose() * x;
    const int p_level = k - 2;  // the last two parts are scanned as a pair
    Eigen::VectorXd u(bw), v(bw);

    // depth-first over the first k-2 parts, lexicographic throughout so the
    // first strict minimum wins ties
    std::vector<double> partial(std::max(p_level, 1), 0.0);
    auto scan_pair = [&](double base) {
      const double* lp = lin.data() + static_cast<Eigen::Index>(p_level) * bw;
      const double* ll = lin.data() + static_cast<Eigen::Index>(k - 1) * bw;
      for (long j = 0; j < bw; ++j) {
        u[j] = lp[j];
        v[j] = ll[j];
        for (int a = 0; a < p_level; ++a) {
          const Eigen::Index row = static_cast<Eigen::Index>(a) * bw + support[a];
          u[j] += 2.0 * gram(row, static_cast<Eigen::Index>(p_level) * bw + j);
          v[j] += 2.0 * gram(row, static_cast<Eigen::Index>(k - 1) * bw + j);
        }
      }
      for (long j = 0; j < bw; ++j) {
        const double w = base + u[j];
        const Eigen::Index row = static_cast<Eigen::Index>(p_level) * bw + j;
        for (long jb = 0; jb < bw; ++jb) {
          const double c = w + v[jb] + 2.0 * gram(row, static_cast<Eigen::Index>(k - 1) * bw + jb);
          if (c < best_cost) {
            best_cost = c;
            best_support = support;
            best_support[p_level] = static_cast<int>(j);
            best_support[k - 1] = static_cast<int>(jb);
          }
        }
      }
    };

    if (p_level == 0) {
      scan_pair(0.0);
    } else {
      int level = 0;
      support[0] = -1;
      while (level >= 0) {
        if (++support[level] == bw) {
          --level;
          continue;
        }
        const int j = support[level];
        double c = partial[level] + lin[static_cast<Eigen::Index>(level) * bw + j];
        for (int a = 0; a < level; ++a)
          c += 2.0 * gram(static_cast<Eigen::Index>(a) * bw + support[a],
                          static_cast<Eigen::Index>(level) * bw + j);
        if (level == p_level - 1) {
          scan_pair(c);
        } else {
          partial[level + 1] = c;
          ++level;
          support[level] = -1;
        }
      }
    }
  }

  SolveResult out;
  out.theta = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < k; ++i) out.theta[static_cast<Eigen::Index>(i) * bw + best_support[i]] = 1.0;
  out.objective = 0.5 * (x * out.theta - y).squaredNorm() / static_cast<double>(m);
  return out;
}

SolveResult l0_bruteforce_general(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int k) {
  const Eigen::Index m = x.rows(), n = x.cols();
  if (k < 1 || k > n) throw PreconditionViolated("k out of range");
  if (k > m) throw PreconditionViolated("k may not exceed the number of rows");
  double count = 1.0;
  for (int i = 0; i < k; ++i) count *= static_cast<double>(n - i) / (i + 1);
  if (count > 1e5) throw SearchSpaceTooLarge("C(n,k) exceeds the 1e5 budget");

  std::vector<Eigen::Index> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  Eigen::MatrixXd cols(m, k);
  double best_cost = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_theta = Eigen::VectorXd::Zero(n);
  while (true) {
    for (int i = 0; i < k; ++i) cols.col(i) = x.col(idx[i]);
    const Eigen::VectorXd beta = cols.colPivHouseholderQr().solve(y);
    const double cost = (cols * beta - y).squaredNorm();
    if (cost < best_cost) {
      best_cost = cost;
      best_theta.setZero();
      for (int i = 0; i < k; ++i) best_theta[idx[i]] = beta[i];
    }
    // next combination in lexicographic order
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int t = i + 1; t < k; ++t) idx[t] = idx[t - 1] + 1;
  }

  SolveResult out;
  out.theta = std::move(best_theta);
  out.objective = 0.5 * best_cost / static_cast<double>(m);
  return out;
}

double prediction_error(const Eigen::MatrixXd& x, const Eigen::VectorXd& theta_hat,
                        const Eigen::VectorXd& theta_star) {
  return (x * (theta_hat - theta_star)).squaredNorm() / static_cast<double>(x.rows());
}

double residual_mse(const Eigen::MatrixXd& x, const Eigen::VectorXd& theta_hat,
                    const Eigen::VectorXd& y) {
  return (x * theta_hat - y).squaredNorm() / static_cast<double>(x.rows());
}

bool in_cone(const Eigen::VectorXd& v, const std::set<int>& support, double epsilon, double tol) {
  double on = 0.0, off = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (support.count(static_cast<int>(i)))
      on += std::abs(v[i]);
    else
      off += std::abs(v[i]);
  }
  return off <= (1.0 + epsilon) * on + tol;
}

ReEstimate re_constant_estimate(const Eigen::MatrixXd& x_tilde, const std::set<int>& support,
                                double epsilon, int budget, RngEngine& rng) {
  const Eigen::Index m = x_tilde.rows(), n = x_tilde.cols();
  if (support.empty()) throw PreconditionViolated("support must be nonempty");
  for (int j : support)
    if (j < 0 || j >= n) throw PreconditionViolated("support index out of range");
  const double md = static_cast<double>(m);

  ReEstimate best;
  best.value = std::numeric_limits<double>::infinity();
  auto consider = [&](const Eigen::VectorXd& theta) {
    const double sq = theta.squaredNorm();
    if (sq == 0.0) return;
    const double ratio = (x_tilde * theta).squaredNorm() / (md * sq);
    if (ratio < best.value) {
      best.value = ratio;
      best.witness = theta;
    }
  };

  // all 1-sparse cone members on the support
  for (int j : support) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[j] = 1.0;
    consider(e);
  }
  // random sparse-dominant directions, rescaled off-support so they stay in the cone
  std::vector<int> off;
  off.reserve(n - support.size());
  for (int j = 0; j < n; ++j)
    if (!support.count(j)) off.push_back(j);
  for (int t = 0; t < budget; ++t) {
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
    double on_l1 = 0.0;
    for (int j : support) {
      theta[j] = rand_normal(rng);
      on_l1 += std::abs(theta[j]);
    }
    if (!off.empty() && on_l1 > 0.0) {
      Eigen::VectorXd dir(off.size());
      for (Eigen::Index i = 0; i < dir.size(); ++i) dir[i] = rand_normal(rng);
      const double l1 = dir.lpNorm<1>();
      if (l1 > 0.0) {
        const double target = rand_uniform(rng) * (1.0 + epsilon) * on_l1;
        dir *= target / l1;
        for (std::size_t i = 0; i < off.size(); ++i) theta[off[i]] = dir[i];
      }
    }
    consider(theta);
  }
  return best;
}

std::optional<int> averaging_split_check(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                         double epsilon) {
  if (x.size() != y.size() || x.size() < 1) throw PreconditionViolated("length mismatch");
  if (!(epsilon > 0.0 && epsilon < 0.05)) throw PreconditionViolated("epsilon must be in (0, 1/20)");
  const int k = static_cast<int>(x.size());
  double sx = 0.0, sy = 0.0;
  for (int i = 0; i < k; ++i) {
    if (x[i] < 0.0 || y[i] < 0.0) throw PreconditionViolated("entries must be nonnegative");
    sx += x[i];
    sy += y[i];
  }
  if (std::abs(sx + sy - 1.0) > 1e-9) throw PreconditionViolated("sums must total 1");
  if (sy > (1.0 + epsilon) * sx + 1e-12) throw PreconditionViolated("sum(y) exceeds (1+eps)sum(x)");
  for (int i = 0; i < k; ++i)
    if (x[i] >= epsilon / k && y[i] <= (1.0 + 10.0 * epsilon) * x[i]) return i;
  return std::nullopt;
}

}  // namespace latreg
