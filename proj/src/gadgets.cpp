#include "latreg/gadgets.hpp"

#include "latreg/errors.hpp"

#include <cmath>
#include <functional>

namespace latreg {

namespace {
constexpr long kDenseLimit = 1L << 16;
}

GadgetShape GadgetShape::make(int d, int k) {
  if (d < 1 || k < 1) throw BadShape("gadget shape needs d >= 1 and k >= 1");
  if (d % k != 0) throw BadShape("gadget shape needs k | d");
  if (d / k > 62) throw BadShape("block width 2^(d/k) overflows");
  return GadgetShape{d, k};
}

Eigen::VectorXd PartiteSparseVector::dense() const {
  if (static_cast<int>(support.size()) != k) throw NotInSnk("support size != k");
  const long bw = n / k;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < k; ++i) {
    if (support[i] < 0 || support[i] >= bw) throw NotInSnk("support index out of range");
    v[static_cast<long>(i) * bw + support[i]] = 1.0;
  }
  return v;
}

Eigen::MatrixXd gadget_block(const GadgetShape& shape) {
  const int bh = shape.block_height();
  const long bw = shape.block_width();
  if (bw > kDenseLimit) throw BadShape("block too wide to materialize");
  Eigen::MatrixXd h(bh, bw);
  for (long j = 0; j < bw; ++j)
    for (int r = 0; r < bh; ++r) h(r, j) = gadget_block_entry(bh, r, j);
  return h;
}

Eigen::MatrixXd build_g_sparse(const GadgetShape& shape) {
  if (shape.n() > kDenseLimit) throw BadShape("n too large to materialize G_sparse");
  const Eigen::MatrixXd h = gadget_block(shape);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(shape.d, shape.n());
  for (int i = 0; i < shape.k; ++i)
    g.block(i * shape.block_height(), i * shape.block_width(), shape.block_height(),
            shape.block_width()) = h;
  return g;
}

Eigen::MatrixXd build_g_partite(long n, int k) {
  if (k < 1 || n < k || n % k != 0) throw BadShape("G_partite needs k | n");
  if (n > kDenseLimit) throw BadShape("n too large to materialize G_partite");
  const long bw = n / k;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(k, n);
  for (int i = 0; i < k; ++i) g.block(i, i * bw, 1, bw).setOnes();
  return g;
}

Eigen::MatrixXd build_g_partite(const GadgetShape& shape) {
  return build_g_partite(shape.n(), shape.k);
}

Eigen::VectorXd g_sparse_times(const GadgetShape& shape, const Eigen::VectorXd& theta) {
  if (theta.size() != shape.n()) throw BadShape("theta length != n");
  const int bh = shape.block_height();
  const long bw = shape.block_width();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(shape.d);
  for (int i = 0; i < shape.k; ++i) {
    for (long j = 0; j < bw; ++j) {
      const double c = theta[static_cast<long>(i) * bw + j];
      if (c == 0.0) continue;
      for (int r = 0; r < bh; ++r) out[i * bh + r] += c * gadget_block_entry(bh, r, j);
    }
  }
  return out;
}

Eigen::VectorXd g_partite_times(long n, int k, const Eigen::VectorXd& theta) {
  if (theta.size() != n || n % k != 0) throw BadShape("theta length != n or k does not divide n");
  const long bw = n / k;
  Eigen::VectorXd out(k);
  for (int i = 0; i < k; ++i) out[i] = theta.segment(static_cast<long>(i) * bw, bw).sum();
  return out;
}

PartiteSparseVector encode_sign_vector(const Eigen::VectorXi& z, const GadgetShape& shape) {
  if (z.size() != shape.d) throw NotSignVector("sign vector length != d");
  const int bh = shape.block_height();
  PartiteSparseVector theta{shape.n(), shape.k, std::vector<int>(shape.k, 0)};
  for (int i = 0; i < shape.k; ++i) {
    long j = 0;
    for (int r = 0; r < bh; ++r) {
      const int e = z[i * bh + r];
      if (e != 1 && e != -1) throw NotSignVector("entries must be +-1");
      if (e == -1) j |= 1L << (bh - 1 - r);
    }
    theta.support[i] = static_cast<int>(j);
  }
  return theta;
}

Eigen::VectorXi decode_partite(const PartiteSparseVector& theta, const GadgetShape& shape) {
  if (theta.n != shape.n() || theta.k != shape.k ||
      static_cast<int>(theta.support.size()) != shape.k)
    throw NotInSnk("partite vector does not match shape");
  const int bh = shape.block_height();
  const long bw = shape.block_width();
  Eigen::VectorXi z(shape.d);
  for (int i = 0; i < shape.k; ++i) {
    const long j = theta.support[i];
    if (j < 0 || j >= bw) throw NotInSnk("support index out of range");
    for (int r = 0; r < bh; ++r)
      z[i * bh + r] = ((j >> (bh - 1 - r)) & 1L) ? -1 : 1;
  }
  return z;
}

bool is_in_snk(const Eigen::VectorXd& v, long n, int k, double tol) {
  if (v.size() != n || n % k != 0) return false;
  const long bw = n / k;
  long nonzeros = 0;
  for (long i = 0; i < n; ++i) {
    const double x = std::abs(v[i]);
    if (x <= tol) continue;
    ++nonzeros;
    if (nonzeros > k) return false;
    if (std::abs(v[i] - 1.0) > tol) return false;
  }
  for (int i = 0; i < k; ++i) {
    const double s = v.segment(static_cast<long>(i) * bw, bw).sum();
    if (std::abs(s - 1.0) > tol) return false;
  }
  return true;
}

bool is_in_snk(const Eigen::VectorXd& v, const GadgetShape& shape, double tol) {
  return is_in_snk(v, shape.n(), shape.k, tol);
}

void for_each_snk_support(long n, int k,
                          const std::function<void(const std::vector<int>&)>& fn) {
  if (k < 1 || n % k != 0) throw BadShape("k must divide n");
  const long bw = n / k;
  std::vector<int> support(k, 0);
  while (true) {
    fn(support);
    int part = k - 1;
    while (part >= 0) {
      if (++support[part] < bw) break;
      support[part] = 0;
      --part;
    }
    if (part < 0) return;
  }
}

}  // namespace latreg
