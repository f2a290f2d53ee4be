#pragma once

#include "latreg/rng.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>

namespace latreg {

/// Full-rank square basis with cached spectral data.
class LatticeBasis {
 public:
  explicit LatticeBasis(Eigen::MatrixXd entries);

  const Eigen::MatrixXd& matrix() const { return entries_; }
  int dim() const { return static_cast<int>(entries_.rows()); }
  double sigma_min() const { return sigma_min_; }
  double sigma_max() const { return sigma_max_; }
  double kappa() const { return sigma_max_ / sigma_min_; }

 private:
  Eigen::MatrixXd entries_;
  double sigma_min_ = 0.0;
  double sigma_max_ = 0.0;
};

struct HiddenWitness {
  Eigen::VectorXi z;   // in {-1,+1}^d
  Eigen::VectorXd e;   // target = B z + e
};

struct BinaryBddInstance {
  LatticeBasis basis;
  Eigen::VectorXd target;
  double alpha = 0.0;
  std::optional<HiddenWitness> hidden;
  std::optional<double> lambda1_bin;  // cached exact value
};

struct BddSolveReport {
  bool solved = false;
  std::optional<Eigen::VectorXi> z_hat;
  double residual = 0.0;   // ||B z_hat - t||
  double wall_time = 0.0;  // seconds
  std::string method;
};

/// B = U diag(s) V^T with Haar orthogonal factors and singular values
/// log-uniformly interpolated between 1 and kappa_target.
LatticeBasis sample_random_basis(int d, double kappa_target, RngEngine& rng);

/// Exact min over nonzero v in {-1,0,1}^d of 2*||B v||; difference vectors of
/// distinct sign vectors are exactly 2*{-1,0,1}^d. Enumeration is pruned via
/// the QR form of B and deduplicated over +-v. Rejects d > 24.
double lambda1_bin_exact(const LatticeBasis& basis);

/// Exact shortest nonzero lattice vector length, enumerating integer
/// coefficients with ||z||_inf <= ceil(radius_mult * kappa). Rejects d > 8.
double lambda1_exact(const LatticeBasis& basis, double radius_mult = 1.0);

/// (sigma_min, 2*sigma_max): enumeration-free bracket for both lambda values.
std::pair<double, double> lambda_sandwich(const LatticeBasis& basis);

/// Entrywise rounding of B^{-1} t; halves round away from zero.
Eigen::VectorXi babai_round(const LatticeBasis& basis, const Eigen::VectorXd& target);

/// Draws z uniform on {-1,+1}^d and e uniform on the sphere of radius
/// noise_ratio * alpha * lambda1_bin(B); target = B z + e.
BinaryBddInstance make_binary_bdd(const LatticeBasis& basis, double alpha, double noise_ratio,
                                  RngEngine& rng);

/// True iff ||B z - t|| <= alpha * lambda1_bin(B) + 1e-9.
bool verify_binary_bdd_solution(const BinaryBddInstance& inst, const Eigen::VectorXi& z);

/// Binary-expansion reduction of a coefficient-bounded instance to a +-1 one.
/// basis' = B * (I_d kron (1, 2, ..., q/2)) and the target is shifted so that
/// a +-1 solution of (basis', target') encodes the original coefficients.
struct BddGadgetReduction {
  Eigen::MatrixXd basis;   // d x (d * log2 q)
  Eigen::VectorXd target;  // 2t - basis * 1
  int q = 0;
  int bits_per_coord = 0;

  /// Decodes a sign solution back to the coefficient vector in {0,...,q-1}^d.
  Eigen::VectorXi decode(const Eigen::VectorXi& z_pm) const;
};

BddGadgetReduction bdd_to_binary_gadget(const LatticeBasis& basis, const Eigen::VectorXd& target,
                                        int q);

/// Rounds half away from zero, the convention used throughout.
inline double round_half_away(double x) { return std::round(x); }
Eigen::VectorXi round_vector(const Eigen::VectorXd& v);

}  // namespace latreg
