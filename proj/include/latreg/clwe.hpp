#pragma once

#include "latreg/reduction.hpp"
#include "latreg/rng.hpp"

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <string>

namespace latreg {

/// Columns of A are the samples: b_j = <s, col_j(A)> + e_j (mod 1) in the
/// planted case, b uniform on [-1/2, 1/2)^n in the null case.
struct ClweSample {
  Eigen::MatrixXd a;  // m x n, iid standard normal
  Eigen::VectorXd b;  // length n, entries in [-1/2, 1/2)
  double gamma_clwe = 0.0;
  double beta = 0.0;
  std::string provenance;  // clwe | null
  std::optional<Eigen::VectorXd> hidden_secret;  // s in R^m, norm gamma_clwe
};

struct ClweSlrInstance {
  SlrInstance slr;        // X = (A ; alpha_scale G_partite), y = (0 ; alpha_scale 1)
  double alpha_scale = 0.0;
  double gamma_clwe = 0.0;
};

/// Representative of x mod 1 in [-1/2, 1/2); +1/2 maps to -1/2.
inline double mod1(double x) { return x - std::floor(x + 0.5); }

ClweSample sample_clwe(int m, long n, double gamma_clwe, double beta, RngEngine& rng);
ClweSample sample_null(int m, long n, RngEngine& rng);

/// delta = 1 / (100 gamma_clwe sqrt(m+k)), alpha = max(sqrt(n), 3/(100 gamma)).
ClweSlrInstance build_slr_from_clwe(const ClweSample& sample, int k);

/// 1 iff |<b, round(theta_hat)> mod 1| < 1/4.
int distinguish(const ClweSample& sample, const Eigen::VectorXd& theta_hat);

/// Dimension scale n = k * 2^(ceil(c * (m/k) * log2 m)), the knob that trades
/// solution existence against enumeration cost.
long clwe_dimension_scale(int m, int k, double c);

}  // namespace latreg
