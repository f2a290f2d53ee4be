#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace latreg {

/// Shape of the sparsity gadget: d-dimensional sign vectors map to k-sparse
/// k-partite binary vectors of length n = k * 2^(d/k).
struct GadgetShape {
  int d = 0;
  int k = 0;

  static GadgetShape make(int d, int k);  // validates k >= 1 and k | d

  int block_height() const { return d / k; }
  long block_width() const { return 1L << (d / k); }
  long n() const { return static_cast<long>(k) * block_width(); }
};

/// Element of S_{n,k}: exactly one 1 per contiguous block of width n/k.
/// Stored as one column index per part.
struct PartiteSparseVector {
  long n = 0;
  int k = 0;
  std::vector<int> support;  // length k, entries in [0, n/k)

  Eigen::VectorXd dense() const;
};

/// Column j of the +-1 block H, row ell: +1 when bit (height-1-ell) of j is
/// clear, so column 0 is all ones.
inline double gadget_block_entry(int height, int row, long col) {
  return ((col >> (height - 1 - row)) & 1L) ? -1.0 : 1.0;
}

/// The (d/k) x 2^(d/k) block H whose columns run through {-1,+1}^(d/k).
Eigen::MatrixXd gadget_block(const GadgetShape& shape);

/// Dense d x n block-diagonal sparsity gadget (k copies of H).
/// Only available for n <= 2^16; use the *_times products beyond that.
Eigen::MatrixXd build_g_sparse(const GadgetShape& shape);

/// Dense k x n block-diagonal partite gadget (k all-ones rows of width n/k).
Eigen::MatrixXd build_g_partite(long n, int k);
Eigen::MatrixXd build_g_partite(const GadgetShape& shape);

/// Structure-exploiting products; never materialize the gadget.
Eigen::VectorXd g_sparse_times(const GadgetShape& shape, const Eigen::VectorXd& theta);
Eigen::VectorXd g_partite_times(long n, int k, const Eigen::VectorXd& theta);

/// Maps a sign vector to the unique theta in S_{n,k} with G_sparse * theta = z.
PartiteSparseVector encode_sign_vector(const Eigen::VectorXi& z, const GadgetShape& shape);

/// Inverse direction: G_sparse * theta for theta in S_{n,k}, returned as signs.
Eigen::VectorXi decode_partite(const PartiteSparseVector& theta, const GadgetShape& shape);

/// Membership test based on the characterization: v in S_{n,k} iff v is
/// k-sparse and every block sums to 1 with all nonzero entries equal to 1.
bool is_in_snk(const Eigen::VectorXd& v, long n, int k, double tol = 1e-9);
bool is_in_snk(const Eigen::VectorXd& v, const GadgetShape& shape, double tol = 1e-9);

/// Visits all (n/k)^k members of S_{n,k} in lexicographic support order.
/// The callback receives the support (one index per part).
void for_each_snk_support(long n, int k, const std::function<void(const std::vector<int>&)>& fn);

}  // namespace latreg
