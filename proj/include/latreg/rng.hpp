#pragma once

#include <Eigen/Core>

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace latreg {

using RngEngine = std::mt19937_64;

/// SplitMix64 finalizer. This is the single mixing primitive used for all
/// seed derivation so that runs are reproducible across worker counts.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Absorbs a sequence of words into a single seed: h <- splitmix64(h ^ w).
inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (std::uint64_t w : words) h = splitmix64(h ^ w);
  return h;
}

inline std::uint64_t seed_word(double v) { return std::bit_cast<std::uint64_t>(v); }

inline RngEngine make_engine(std::uint64_t seed) { return RngEngine(seed); }

inline double rand_normal(RngEngine& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

inline double rand_uniform(RngEngine& rng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

/// Gaussian vector, entries drawn in index order.
inline Eigen::VectorXd normal_vector(Eigen::Index n, RngEngine& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

/// Gaussian matrix, entries drawn row by row.
inline Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols, RngEngine& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

/// Uniform point on the sphere of the given radius (zero vector when radius == 0).
inline Eigen::VectorXd sphere_vector(Eigen::Index d, double radius, RngEngine& rng) {
  if (radius == 0.0) return Eigen::VectorXd::Zero(d);
  Eigen::VectorXd g;
  double norm = 0.0;
  do {
    g = normal_vector(d, rng);
    norm = g.norm();
  } while (norm == 0.0);
  return (radius / norm) * g;
}

/// Uniform vector in {-1,+1}^d.
inline Eigen::VectorXi random_sign_vector(Eigen::Index d, RngEngine& rng) {
  Eigen::VectorXi z(d);
  for (Eigen::Index i = 0; i < d; ++i) z[i] = (rng() & 1ULL) ? 1 : -1;
  return z;
}

}  // namespace latreg
