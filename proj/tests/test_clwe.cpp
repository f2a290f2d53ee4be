#include "latreg/clwe.hpp"

#include "latreg/errors.hpp"
#include "latreg/gadgets.hpp"
#include "latreg/harness.hpp"
#include "latreg/serialize.hpp"
#include "latreg/stats.hpp"

#include <doctest.h>

#include <cmath>

using namespace latreg;

TEST_CASE("mod-1 reduction convention") {
  CHECK(mod1(0.7) == doctest::Approx(-0.3));
  CHECK(mod1(-0.5) == -0.5);
  CHECK(mod1(0.5) == -0.5);
  CHECK(mod1(3.0) == 0.0);

  RngEngine rng = make_engine(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const double x = 20.0 * (rand_uniform(rng) - 0.5);
    const int shift = static_cast<int>(rng() % 21) - 10;
    const double r = mod1(x);
    REQUIRE(r >= -0.5);
    REQUIRE(r < 0.5);
    REQUIRE(std::abs(r) <= std::abs(x) + 1e-15);
    REQUIRE(mod1(r) == r);
    REQUIRE(mod1(x + shift) == doctest::Approx(r).epsilon(1e-12));
    const double integer_part = x - r;
    REQUIRE(integer_part == doctest::Approx(std::round(integer_part)));
  }
}

TEST_CASE("planted samples satisfy the defining equation") {
  RngEngine rng = make_engine(2);

  SUBCASE("without error the target is a pure inner product") {
    const ClweSample s = sample_clwe(6, 1, 2.0, 0.0, rng);
    CHECK(s.b[0] ==
          doctest::Approx(mod1(s.hidden_secret->dot(s.a.col(0)))).epsilon(1e-12));
  }

  SUBCASE("the secret lives on the sphere of the requested radius") {
    for (int trial = 0; trial < 20; ++trial) {
      const ClweSample s = sample_clwe(8, 4, 3.5, 0.01, rng);
      REQUIRE(s.hidden_secret->norm() == doctest::Approx(3.5).epsilon(1e-9));
    }
  }

  SUBCASE("reconstructed residuals have variance beta^2") {
    const double beta = 0.01;
    double sq = 0.0;
    long count = 0;
    while (count < 10000) {
      const ClweSample s = sample_clwe(6, 500, 1.0, beta, rng);
      for (long j = 0; j < 500; ++j) {
        const double e = mod1(s.b[j] - s.hidden_secret->dot(s.a.col(j)));
        sq += e * e;
        ++count;
      }
    }
    const double var = sq / count;
    CHECK(var == doctest::Approx(beta * beta).epsilon(0.05));
  }
}

TEST_CASE("null samples look uniform") {
  RngEngine rng = make_engine(4);
  const ClweSample s = sample_null(4, 10000, rng);
  CHECK(s.provenance == "null");
  CHECK_FALSE(s.hidden_secret.has_value());

  std::vector<double> values(s.b.data(), s.b.data() + s.b.size());
  const double ks =
      ks_statistic(values, [](double v) { return std::clamp(v + 0.5, 0.0, 1.0); });
  CHECK(ks < ks_critical_value(values.size(), 0.01));

  const double mean = s.b.mean();
  CHECK(std::abs(mean) <= 3.0 * (1.0 / std::sqrt(12.0)) / std::sqrt(10000.0));
}

TEST_CASE("regression instances built from samples") {
  RngEngine rng = make_engine(4);
  const ClweSample s = sample_clwe(4, 4, 4.0, 0.001, rng);
  const ClweSlrInstance inst = build_slr_from_clwe(s, 1);

  // direct evaluation of the error-budget formula at m=4, k=1, gamma=4
  CHECK(inst.slr.delta == doctest::Approx(1.1180339887498949e-3).epsilon(1e-12));
  CHECK(inst.slr.delta == doctest::Approx(1.0 / (100.0 * 4.0 * std::sqrt(5.0))).epsilon(1e-15));

  // alpha = sqrt(n) whenever gamma >= 3/100
  CHECK(inst.alpha_scale == doctest::Approx(std::sqrt(4.0)));

  const Eigen::MatrixXd expected_bottom = inst.alpha_scale * build_g_partite(4, 1);
  CHECK(inst.slr.x.bottomRows(1).isApprox(expected_bottom));
  CHECK(inst.slr.x.topRows(4).isApprox(s.a));
  CHECK(inst.slr.y.head(4).isZero(0.0));
  CHECK((inst.slr.y.tail(1).array() == inst.alpha_scale).all());

  CHECK_THROWS_AS(build_slr_from_clwe(s, 3), BadShape);
}

TEST_CASE("distinguisher output") {
  RngEngine rng = make_engine(5);

  SUBCASE("the zero target always reports planted") {
    ClweSample s = sample_null(4, 8, rng);
    s.b.setZero();
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(8);
    theta[3] = 1.0;
    CHECK(distinguish(s, theta) == 1);
  }

  SUBCASE("null samples give a fair coin for a fixed integer probe") {
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(8);
    theta[1] = 1.0;
    theta[5] = 1.0;
    int ones = 0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
      const ClweSample s = sample_null(4, 8, rng);
      ones += distinguish(s, theta);
    }
    const double freq = static_cast<double>(ones) / trials;
    CHECK(freq == doctest::Approx(0.5).epsilon(0.04));
  }

  SUBCASE("inner products against null targets are uniform mod 1") {
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(8);
    theta[0] = 1.0;
    theta[4] = -2.0;
    std::vector<double> values;
    for (int t = 0; t < 10000; ++t) {
      const ClweSample s = sample_null(2, 8, rng);
      values.push_back(mod1(s.b.dot(theta)));
    }
    const double ks =
        ks_statistic(values, [](double v) { return std::clamp(v + 0.5, 0.0, 1.0); });
    CHECK(ks < ks_critical_value(values.size(), 0.01));
  }

  SUBCASE("planted samples pass the quarter test on solved instances") {
    int ones = 0;
    const int trials = 60;
    for (int t = 0; t < trials; ++t) {
      const int m = 8, k = 2;
      const long n = 32;
      const ClweSample s = sample_clwe(m, n, kDeskClweGamma, 1e-3, rng);
      const ClweSlrInstance inst = build_slr_from_clwe(s, k);
      const SolveResult sol = l0_bruteforce_partite(inst.slr.x, inst.slr.y, k);
      ones += distinguish(s, sol.theta);
    }
    CHECK(static_cast<double>(ones) / trials >= 0.9);
  }
}

TEST_CASE("dimension scale helper") {
  // m=16, k=4: exponent ceil(c * 4 * 4); c = 0.3125 gives 2^5 per block
  CHECK(clwe_dimension_scale(16, 4, 0.3125) == 4L * 32);
  CHECK(clwe_dimension_scale(16, 4, 0.25) == 4L * 16);
  CHECK_THROWS_AS(clwe_dimension_scale(16, 4, 100.0), BadShape);
}

TEST_CASE("sample serialization honors the secrets flag") {
  RngEngine rng = make_engine(6);
  const ClweSample s = sample_clwe(4, 8, 2.0, 0.01, rng);

  const nlohmann::json with = clwe_sample_to_json(s, true);
  const ClweSample restored = clwe_sample_from_json(with);
  CHECK(restored.a.isApprox(s.a, 0.0));
  CHECK(restored.b.isApprox(s.b, 0.0));
  CHECK(restored.hidden_secret.has_value());
  CHECK(restored.hidden_secret->isApprox(*s.hidden_secret, 0.0));

  const nlohmann::json without = clwe_sample_to_json(s, false);
  CHECK_FALSE(clwe_sample_from_json(without).hidden_secret.has_value());
}
