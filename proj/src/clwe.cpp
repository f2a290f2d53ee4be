#include "latreg/clwe.hpp"

#include "latreg/errors.hpp"
#include "latreg/gadgets.hpp"

#include <cmath>

namespace latreg {

ClweSample sample_clwe(int m, long n, double gamma_clwe, double beta, RngEngine& rng) {
  if (m < 1 || n < 1 || !(gamma_clwe > 0.0) || beta < 0.0)
    throw PreconditionViolated("parameters must be positive");
  ClweSample s;
  s.a = normal_matrix(m, n, rng);
  s.gamma_clwe = gamma_clwe;
  s.beta = beta;
  s.provenance = "clwe";
  const Eigen::VectorXd secret = sphere_vector(m, gamma_clwe, rng);
  Eigen::VectorXd b = s.a.transpose() * secret;
  if (beta > 0.0) b += beta * normal_vector(n, rng);
  for (Eigen::Index i = 0; i < n; ++i) b[i] = mod1(b[i]);
  s.b = std::move(b);
  s.hidden_secret = secret;
  return s;
}

ClweSample sample_null(int m, long n, RngEngine& rng) {
  if (m < 1 || n < 1) throw PreconditionViolated("parameters must be positive");
  ClweSample s;
  s.a = normal_matrix(m, n, rng);
  s.b.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) s.b[i] = rand_uniform(rng) - 0.5;
  s.provenance = "null";
  return s;
}

ClweSlrInstance build_slr_from_clwe(const ClweSample& sample, int k) {
  const Eigen::Index m = sample.a.rows();
  const long n = sample.a.cols();
  if (k < 1 || n % k != 0) throw BadShape("k must divide n");
  ClweSlrInstance out;
  out.gamma_clwe = sample.gamma_clwe;
  out.alpha_scale = std::max(std::sqrt(static_cast<double>(n)),
                             3.0 / (100.0 * sample.gamma_clwe));
  SlrInstance& slr = out.slr;
  slr.x.resize(m + k, n);
  slr.x.topRows(m) = sample.a;
  slr.x.bottomRows(k) = out.alpha_scale * build_g_partite(n, k);
  slr.y = Eigen::VectorXd::Zero(m + k);
  slr.y.tail(k).setConstant(out.alpha_scale);
  slr.delta = 1.0 / (100.0 * sample.gamma_clwe * std::sqrt(static_cast<double>(m + k)));
  slr.k = k;
  slr.provenance = "from-clwe";
  return out;
}

int distinguish(const ClweSample& sample, const Eigen::VectorXd& theta_hat) {
  if (theta_hat.size() != sample.a.cols()) throw BadShape("theta length != n");
  double dot = 0.0;
  for (Eigen::Index i = 0; i < theta_hat.size(); ++i)
    dot += sample.b[i] * std::round(theta_hat[i]);
  return std::abs(mod1(dot)) < 0.25 ? 1 : 0;
}

long clwe_dimension_scale(int m, int k, double c) {
  if (m < 2 || k < 1 || !(c > 0.0)) throw PreconditionViolated("bad scale parameters");
  const double exponent =
      std::ceil(c * (static_cast<double>(m) / k) * std::log2(static_cast<double>(m)));
  if (exponent > 40) throw BadShape("dimension scale overflows");
  return static_cast<long>(k) * (1L << static_cast<long>(exponent));
}

}  // namespace latreg
