#include "latreg/lattice.hpp"

#include "latreg/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace latreg {

LatticeBasis::LatticeBasis(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.rows() != entries_.cols())
    throw SingularBasis("basis must be square and nonempty");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(entries_);
  sigma_max_ = svd.singularValues()[0];
  sigma_min_ = svd.singularValues()[entries_.rows() - 1];
  if (!(sigma_min_ > 1e-10 * sigma_max_) || sigma_max_ <= 0.0)
    throw SingularBasis("basis is rank deficient beyond tolerance");
}

Eigen::VectorXi round_vector(const Eigen::VectorXd& v) {
  // std::round rounds halfway cases away from zero, the pinned convention
  Eigen::VectorXi out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = static_cast<int>(std::round(v[i]));
  return out;
}

namespace {

Eigen::MatrixXd haar_orthogonal(int d, RngEngine& rng) {
  const Eigen::MatrixXd g = normal_matrix(d, d, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::VectorXd diag = qr.matrixQR().diagonal();
  for (int j = 0; j < d; ++j)
    if (diag[j] < 0) q.col(j) *= -1.0;
  return q;
}

/// Depth-first search over integer coefficient vectors via the QR form of B.
/// Levels run from the last coordinate down; the accumulated squared norm of
/// the processed rows lower-bounds the final one, which drives the pruning.
class ShortVectorSearch {
 public:
  ShortVectorSearch(const Eigen::MatrixXd& b, long radius, bool antipodal_dedup)
      : radius_(radius), dedup_(antipodal_dedup) {
    d_ = static_cast<int>(b.rows());
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
    r_ = qr.matrixQR().triangularView<Eigen::Upper>();
    v_.assign(d_, 0.0);
    best2_ = std::numeric_limits<double>::infinity();
    for (int j = 0; j < d_; ++j) best2_ = std::min(best2_, b.col(j).squaredNorm());
    best2_ *= 1.0 + 1e-12;  // unit vectors are feasible, so the bound is achievable
  }

  double min_norm() {
    dfs(d_ - 1, 0.0, true);
    return std::sqrt(best2_);
  }

 private:
  void dfs(int level, double partial, bool all_zero_above) {
    if (level < 0) {
      if (!all_zero_above && partial < best2_) best2_ = partial;
      return;
    }
    double proj = 0.0;
    for (int j = level + 1; j < d_; ++j) proj += r_(level, j) * v_[j];
    const double rii = r_(level, level);
    const double center = -proj / rii;
    const double slack = best2_ - partial;
    if (slack <= 0.0) return;
    const double width = std::sqrt(slack) / std::abs(rii);
    long lo = static_cast<long>(std::ceil(center - width));
    long hi = static_cast<long>(std::floor(center + width));
    lo = std::max(lo, -radius_);
    hi = std::min(hi, radius_);
    if (dedup_ && all_zero_above) lo = std::max(lo, 0L);
    if (lo > hi) return;
    // zig-zag around the continuous minimizer so good branches come first
    long down = std::lround(center);
    down = std::min(std::max(down, lo), hi);
    long up = down + 1;
    bool take_down = true;
    while (down >= lo || up <= hi) {
      long val;
      if (down >= lo && (take_down || up > hi)) {
        val = down--;
        take_down = false;
      } else {
        val = up++;
        take_down = true;
      }
      const double term = rii * static_cast<double>(val) + proj;
      const double cost = partial + term * term;
      if (cost >= best2_) continue;
      v_[level] = static_cast<double>(val);
      dfs(level - 1, cost, all_zero_above && val == 0);
    }
    v_[level] = 0.0;
  }

  int d_ = 0;
  long radius_ = 0;
  bool dedup_ = false;
  Eigen::MatrixXd r_;
  std::vector<double> v_;
  double best2_ = 0.0;
};

}  // namespace

LatticeBasis sample_random_basis(int d, double kappa_target, RngEngine& rng) {
  if (d < 1) throw BadShape("dimension must be positive");
  if (!(kappa_target >= 1.0)) throw PreconditionViolated("kappa_target must be >= 1");
  const Eigen::MatrixXd u = haar_orthogonal(d, rng);
  const Eigen::MatrixXd v = haar_orthogonal(d, rng);
  Eigen::VectorXd s(d);
  if (d == 1) {
    s[0] = 1.0;
  } else {
    for (int i = 0; i < d; ++i)
      s[i] = std::pow(kappa_target, static_cast<double>(i) / static_cast<double>(d - 1));
  }
  return LatticeBasis(u * s.asDiagonal() * v.transpose());
}

double lambda1_bin_exact(const LatticeBasis& basis) {
  if (basis.dim() > 24) throw DimensionTooLarge("lambda1_bin enumeration limited to d <= 24");
  ShortVectorSearch search(basis.matrix(), 1, true);
  return 2.0 * search.min_norm();
}

double lambda1_exact(const LatticeBasis& basis, double radius_mult) {
  if (basis.dim() > 8) throw DimensionTooLarge("lambda1 enumeration limited to d <= 8");
  if (!(radius_mult > 0)) throw PreconditionViolated("radius_mult must be positive");
  const long radius = static_cast<long>(std::ceil(radius_mult * basis.kappa()));
  ShortVectorSearch search(basis.matrix(), std::max(radius, 1L), true);
  return search.min_norm();
}

std::pair<double, double> lambda_sandwich(const LatticeBasis& basis) {
  return {basis.sigma_min(), 2.0 * basis.sigma_max()};
}

Eigen::VectorXi babai_round(const LatticeBasis& basis, const Eigen::VectorXd& target) {
  if (target.size() != basis.dim()) throw BadShape("target length != d");
  const Eigen::VectorXd coeffs = basis.matrix().colPivHouseholderQr().solve(target);
  if (!coeffs.allFinite()) throw SingularBasis("linear solve failed");
  return round_vector(coeffs);
}

BinaryBddInstance make_binary_bdd(const LatticeBasis& basis, double alpha, double noise_ratio,
                                  RngEngine& rng) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw PreconditionViolated("alpha must be in (0, 1/2)");
  if (!(noise_ratio >= 0.0 && noise_ratio <= 1.0))
    throw PreconditionViolated("noise_ratio must be in [0, 1]");
  const double l1bin = lambda1_bin_exact(basis);
  const Eigen::VectorXi z = random_sign_vector(basis.dim(), rng);
  const Eigen::VectorXd e = sphere_vector(basis.dim(), noise_ratio * alpha * l1bin, rng);
  BinaryBddInstance inst{basis, basis.matrix() * z.cast<double>() + e, alpha,
                         HiddenWitness{z, e}, l1bin};
  return inst;
}

bool verify_binary_bdd_solution(const BinaryBddInstance& inst, const Eigen::VectorXi& z) {
  if (z.size() != inst.basis.dim()) throw NotSignVector("solution length != d");
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (z[i] != 1 && z[i] != -1) throw NotSignVector("entries must be +-1");
  const double l1bin =
      inst.lambda1_bin ? *inst.lambda1_bin : lambda1_bin_exact(inst.basis);
  const double residual = (inst.basis.matrix() * z.cast<double>() - inst.target).norm();
  return residual <= inst.alpha * l1bin + 1e-9;
}

Eigen::VectorXi BddGadgetReduction::decode(const Eigen::VectorXi& z_pm) const {
  if (z_pm.size() != basis.cols()) throw NotSignVector("solution length mismatch");
  const int d = static_cast<int>(basis.rows());
  Eigen::VectorXi coeffs = Eigen::VectorXi::Zero(d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < bits_per_coord; ++j) {
      const int s = z_pm[i * bits_per_coord + j];
      if (s != 1 && s != -1) throw NotSignVector("entries must be +-1");
      coeffs[i] += ((s + 1) / 2) << j;
    }
  }
  return coeffs;
}

BddGadgetReduction bdd_to_binary_gadget(const LatticeBasis& basis, const Eigen::VectorXd& target,
                                        int q) {
  if (q < 2 || (q & (q - 1)) != 0) throw QNotPowerOfTwo("q must be a power of two >= 2");
  if (target.size() != basis.dim()) throw BadShape("target length != d");
  const int d = basis.dim();
  int bits = 0;
  for (int t = q; t > 1; t >>= 1) ++bits;
  Eigen::MatrixXd expanded(d, static_cast<Eigen::Index>(d) * bits);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < bits; ++j)
      expanded.col(static_cast<Eigen::Index>(i) * bits + j) =
          basis.matrix().col(i) * static_cast<double>(1 << j);
  BddGadgetReduction red;
  red.q = q;
  red.bits_per_coord = bits;
  red.target = 2.0 * target - expanded * Eigen::VectorXd::Ones(expanded.cols());
  red.basis = std::move(expanded);
  return red;
}

}  // namespace latreg
