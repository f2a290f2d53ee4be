#include "latreg/reduction.hpp"

#include "latreg/errors.hpp"
#include "latreg/serialize.hpp"
#include "latreg/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>

using namespace latreg;

namespace {

BinaryBddInstance desk_instance(int d, double kappa, double alpha, RngEngine& rng,
                                double noise_ratio = 1.0) {
  const LatticeBasis basis = sample_random_basis(d, kappa, rng);
  return make_binary_bdd(basis, alpha, noise_ratio, rng);
}

bool bitwise_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

bool bitwise_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

}  // namespace

TEST_CASE("lambda estimate candidates") {
  CHECK(estimate_lambda1_hat(LatticeBasis(Eigen::MatrixXd::Identity(2, 2)),
                             Lambda1Mode::exact) == std::vector<double>{2.0});

  Eigen::MatrixXd d13 = Eigen::MatrixXd::Zero(2, 2);
  d13(0, 0) = 1;
  d13(1, 1) = 3;
  CHECK(estimate_lambda1_hat(LatticeBasis(d13), Lambda1Mode::doubling) ==
        std::vector<double>{1.0, 2.0, 4.0});

  CHECK(estimate_lambda1_hat(LatticeBasis(Eigen::MatrixXd::Identity(4, 4)),
                             Lambda1Mode::doubling) == std::vector<double>{1.0, 2.0});
}

TEST_CASE("parameter formulas are computed exactly") {
  RngEngine rng = make_engine(51);
  const LatticeBasis basis = sample_random_basis(8, 10.0, rng);
  const int m = 136, k = 2;
  const double lhat = 3.7;
  const ReductionParams p = compute_reduction_params(basis, m, k, lhat);
  CHECK(p.m1 == m - k);
  CHECK(p.delta * p.delta == doctest::Approx(3.0 * p.m1 * lhat * lhat / (100.0 * m)).epsilon(1e-15));
  const double gamma_expected =
      std::max(3.0 * p.delta * std::sqrt(double(m)),
               100.0 * basis.sigma_max() * p.delta * std::sqrt(8.0 * m) / (std::sqrt(2.0) * lhat));
  CHECK(p.gamma == gamma_expected);

  CHECK_THROWS_AS(compute_reduction_params(basis, 100, 2, lhat), BadShape);   // m < 17d
  CHECK_THROWS_AS(compute_reduction_params(basis, 136, 3, lhat), BadShape);   // k does not divide d
}

TEST_CASE("instance assembly layout") {
  RngEngine rng = make_engine(52);
  const BinaryBddInstance inst = desk_instance(8, 2.0, 0.05, rng);
  auto [slr, tr] = build_slr_instance(inst, 136, 2, *inst.lambda1_bin, rng);
  const GadgetShape& shape = tr.params.shape;

  CHECK(slr.x.rows() == 136);
  CHECK(slr.x.cols() == shape.n());
  CHECK(slr.provenance == "from-bdd");

  // bottom k rows are exactly gamma * G_partite
  const Eigen::MatrixXd expected_bottom = tr.params.gamma * build_g_partite(shape);
  CHECK(bitwise_equal(Eigen::MatrixXd(slr.x.bottomRows(2)), expected_bottom));
  CHECK((slr.y.tail(2).array() == tr.params.gamma).all());

  // stored normalization scalar matches the column norms
  double max_col = 0.0;
  for (long j = 0; j < shape.n(); ++j) max_col = std::max(max_col, slr.x.col(j).norm());
  CHECK(tr.params.z_scale == doctest::Approx(max_col / std::sqrt(136.0)).epsilon(1e-15));

  // the rounding-correctness gate holds on every produced instance
  CHECK(std::sqrt(136.0) * tr.params.delta / tr.params.gamma < 0.5);
}

TEST_CASE("noiseless instances fit the planted vector exactly") {
  RngEngine rng = make_engine(53);
  const BinaryBddInstance inst = desk_instance(8, 2.0, 0.05, rng, 0.0);
  auto [slr, tr] = build_slr_instance(inst, 136, 2, *inst.lambda1_bin, rng);
  const Eigen::VectorXd planted = encode_sign_vector(inst.hidden->z, tr.params.shape).dense();
  CHECK(residual_mse(slr.x, planted, slr.y) < 1e-20);
  CHECK(residual_mse(slr.x, planted, slr.y) < slr.delta * slr.delta);
}

TEST_CASE("completeness holds with margin at desk scale") {
  RngEngine rng = make_engine(54);
  const int trials = 200;
  int both = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const BinaryBddInstance inst = desk_instance(8, 2.0, 0.1, rng);
    auto [slr, tr] = build_slr_instance(inst, 136, 2, *inst.lambda1_bin, rng);
    const Eigen::VectorXd planted = encode_sign_vector(inst.hidden->z, tr.params.shape).dense();
    const double lhs = residual_mse(slr.x, planted, slr.y);
    const double chi2_bound = 2.5 * tr.params.m1 * inst.hidden->e.squaredNorm() / tr.params.m;
    if (lhs <= chi2_bound && chi2_bound < slr.delta * slr.delta) ++both;
    // the planted residual is exactly ||R e||^2 / m
    const double re = (tr.gaussian_rows * inst.hidden->e).squaredNorm() / tr.params.m;
    REQUIRE(lhs == doctest::Approx(re).epsilon(1e-9));
  }
  CHECK(both >= trials * 95 / 100);
}

TEST_CASE("transcripts rebuild instances bit for bit") {
  RngEngine rng = make_engine(55);
  const BinaryBddInstance inst = desk_instance(6, 3.0, 0.05, rng);
  auto [slr, tr] = build_slr_instance(inst, 102, 3, *inst.lambda1_bin, rng);
  const SlrInstance rebuilt = rebuild_from_transcript(tr, inst.basis, inst.target);
  CHECK(bitwise_equal(slr.x, rebuilt.x));
  CHECK(bitwise_equal(slr.y, rebuilt.y));

  RngEngine rng2 = make_engine(56);
  const BinaryBddInstance other = desk_instance(6, 3.0, 0.05, rng2);
  CHECK_THROWS_AS(rebuild_from_transcript(tr, other.basis, inst.target), HashMismatch);

  // and they survive a serialization round trip
  const ReductionTranscript parsed = transcript_from_json(transcript_to_json(tr));
  const SlrInstance again = rebuild_from_transcript(parsed, inst.basis, inst.target);
  CHECK(bitwise_equal(slr.x, again.x));
}

TEST_CASE("extraction rounds into the code or reports why not") {
  RngEngine rng = make_engine(57);
  const BinaryBddInstance inst = desk_instance(8, 2.0, 0.05, rng);
  auto [slr, tr] = build_slr_instance(inst, 136, 2, *inst.lambda1_bin, rng);
  const GadgetShape& shape = tr.params.shape;
  const Eigen::VectorXd planted = encode_sign_vector(inst.hidden->z, shape).dense();

  SUBCASE("exact encodings decode") {
    const ExtractOutcome out = extract_bdd_solution(planted, tr);
    REQUIRE(out.status == ExtractStatus::ok);
    CHECK(*out.z == inst.hidden->z);
  }
  SUBCASE("perturbations inside the rounding radius decode") {
    Eigen::VectorXd noisy = planted;
    for (long i = 0; i < noisy.size(); ++i)
      if (noisy[i] != 0.0) noisy[i] += 0.3;
    const ExtractOutcome out = extract_bdd_solution(noisy, tr);
    REQUIRE(out.status == ExtractStatus::ok);
    CHECK(*out.z == inst.hidden->z);
  }
  SUBCASE("two nonzeros in a block are rejected") {
    Eigen::VectorXd bad = Eigen::VectorXd::Zero(shape.n());
    bad[0] = bad[1] = 1.0;
    CHECK(extract_bdd_solution(bad, tr).status == ExtractStatus::not_partite);
  }
  SUBCASE("overfull supports are rejected") {
    Eigen::VectorXd dense_vec = Eigen::VectorXd::Constant(shape.n(), 0.1);
    CHECK(extract_bdd_solution(dense_vec, tr).status == ExtractStatus::not_k_sparse);
  }
}

TEST_CASE("the exact-search pipeline solves desk instances") {
  RngEngine rng = make_engine(58);
  int solved = 0;
  const int trials = 25;
  for (int trial = 0; trial < trials; ++trial) {
    const BinaryBddInstance inst = desk_instance(8, 2.0, 0.05, rng);
    const BddSolveReport report = reduce_and_solve(inst, make_l0_partite_solver(), "l0-partite",
                                                   136, 2, Lambda1Mode::exact, rng);
    if (report.solved && *report.z_hat == inst.hidden->z) ++solved;
  }
  CHECK(solved >= trials - 1);
}

TEST_CASE("the doubling search also lands a verified solution") {
  RngEngine rng = make_engine(59);
  const BinaryBddInstance inst = desk_instance(8, 2.0, 0.02, rng);
  const BddSolveReport report = reduce_and_solve(inst, make_l0_partite_solver(), "l0-partite",
                                                 136, 2, Lambda1Mode::doubling, rng);
  CHECK(report.solved);
  CHECK(*report.z_hat == inst.hidden->z);
}

TEST_CASE("a useless solver yields a failure report with the zero residual") {
  RngEngine rng = make_engine(60);
  const BinaryBddInstance inst = desk_instance(8, 2.0, 0.05, rng);
  const SlrSolver zero_solver = [](const SlrInstance& slr, const GadgetShape&) {
    SolveResult r;
    r.theta = Eigen::VectorXd::Zero(slr.x.cols());
    return r;
  };
  const BddSolveReport report =
      reduce_and_solve(inst, zero_solver, "zero", 136, 2, Lambda1Mode::exact, rng);
  CHECK_FALSE(report.solved);
  CHECK_FALSE(report.z_hat.has_value());
  CHECK(report.residual == doctest::Approx(inst.target.norm()));
}

TEST_CASE("thresholded lasso solves well-conditioned tiny-noise instances") {
  RngEngine rng = make_engine(61);
  int solved = 0;
  const int trials = 10;
  for (int trial = 0; trial < trials; ++trial) {
    const BinaryBddInstance inst = desk_instance(8, 1.0, 1e-4, rng);
    const BddSolveReport report = reduce_and_solve(
        inst, make_thresholded_lasso_solver(), "thresholded-lasso", 136, 2,
        Lambda1Mode::exact, rng);
    if (report.solved) ++solved;
  }
  CHECK(solved >= 9);
}

TEST_CASE("scaling the basis rescales parameters and preserves the answer") {
  const double c = 7.5;
  RngEngine basis_rng = make_engine(62);
  const LatticeBasis basis_a = sample_random_basis(8, 3.0, basis_rng);
  const LatticeBasis basis_b(c * basis_a.matrix());

  RngEngine rng_a = make_engine(70);
  RngEngine rng_b = make_engine(70);
  const BinaryBddInstance inst_a = make_binary_bdd(basis_a, 0.05, 1.0, rng_a);
  const BinaryBddInstance inst_b = make_binary_bdd(basis_b, 0.05, 1.0, rng_b);
  CHECK(inst_b.hidden->z == inst_a.hidden->z);
  CHECK(*inst_b.lambda1_bin == doctest::Approx(c * *inst_a.lambda1_bin).epsilon(1e-12));

  RngEngine pipe_a = make_engine(63);
  RngEngine pipe_b = make_engine(63);
  auto [slr_a, tr_a] = build_slr_instance(inst_a, 136, 2, *inst_a.lambda1_bin, pipe_a);
  auto [slr_b, tr_b] = build_slr_instance(inst_b, 136, 2, *inst_b.lambda1_bin, pipe_b);
  CHECK(tr_b.params.delta == doctest::Approx(c * tr_a.params.delta).epsilon(1e-12));
  CHECK(tr_b.params.gamma == doctest::Approx(c * tr_a.params.gamma).epsilon(1e-12));

  const SolveResult sol_a = l0_bruteforce_partite(slr_a.x, slr_a.y, 2);
  const SolveResult sol_b = l0_bruteforce_partite(slr_b.x, slr_b.y, 2);
  CHECK(sol_a.theta == sol_b.theta);
}

TEST_CASE("column normalization") {
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
  const auto [x1, z1] = column_normalize(eye);
  CHECK(z1 == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(x1.col(0).norm() == doctest::Approx(std::sqrt(2.0)));

  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(4, 2);
  x.col(0).setConstant(5.0);  // norm 10
  x(0, 1) = 1.0;
  const auto [x2, z2] = column_normalize(x);
  CHECK(z2 == doctest::Approx(5.0));
  CHECK(x2.col(0).norm() == doctest::Approx(2.0));

  const auto [x3, z3] = column_normalize(x2);
  CHECK(z3 == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(column_normalize(Eigen::MatrixXd::Zero(3, 3)), ZeroMatrix);
}

TEST_CASE("normalization scale tracks the conditioning of the basis") {
  // the stored scale grows linearly with sigma_max across a conditioning sweep
  RngEngine rng = make_engine(64);
  double prev_median = 0.0;
  for (double kappa : {1.0, 10.0, 100.0}) {
    std::vector<double> ratios;
    for (int trial = 0; trial < 20; ++trial) {
      const BinaryBddInstance inst = desk_instance(8, kappa, 0.05, rng);
      auto [slr, tr] = build_slr_instance(inst, 136, 2, *inst.lambda1_bin, rng);
      ratios.push_back(tr.params.z_scale /
                       (inst.basis.sigma_max() * std::sqrt(8.0 / 2.0)));
    }
    const double med = median(ratios);
    CHECK(med > 0.3);
    CHECK(med < 40.0);
    if (prev_median > 0.0) CHECK(med < prev_median * 40.0);
    prev_median = med;
  }
}

TEST_CASE("flooded instances degrade gracefully") {
  RngEngine rng_plain = make_engine(65);
  RngEngine rng_flood = make_engine(65);
  const BinaryBddInstance inst = [&] {
    RngEngine gen = make_engine(66);
    return desk_instance(8, 2.0, 1e-5, gen);
  }();

  SUBCASE("zero flooding noise reproduces the plain construction bit for bit") {
    auto [plain, tr_plain] = build_slr_instance(inst, 136, 2, *inst.lambda1_bin, rng_plain);
    auto [flooded, tr_flood] =
        flood_noise_instance(inst, 136, 2, *inst.lambda1_bin, 0.0, rng_flood);
    CHECK(bitwise_equal(plain.x, flooded.x));
    CHECK(bitwise_equal(plain.y, flooded.y));
    CHECK(tr_flood.sigma_flood == 0.0);
  }

  SUBCASE("the pipeline still recovers under the prescribed noise scale") {
    const int m = 136;
    int recovered = 0;
    const int trials = 20;
    RngEngine rng = make_engine(67);
    for (int trial = 0; trial < trials; ++trial) {
      const BinaryBddInstance it = desk_instance(8, 2.0, 1e-5, rng);
      const double m1 = m - 2;
      const double sigma =
          1e-5 * *it.lambda1_bin * m1 * std::sqrt(std::log(m1));
      auto [slr, tr] = flood_noise_instance(it, m, 2, *it.lambda1_bin, sigma, rng);
      const SolveResult sol = l0_bruteforce_partite(slr.x, slr.y, 2);
      const ExtractOutcome out = extract_bdd_solution(sol.theta, tr);
      if (out.status == ExtractStatus::ok && *out.z == it.hidden->z) ++recovered;
    }
    CHECK(recovered >= trials * 9 / 10);
  }

  SUBCASE("noiseless-error targets have Gaussian marginals") {
    RngEngine rng = make_engine(68);
    std::vector<double> standardized;
    while (standardized.size() < 10000) {
      const BinaryBddInstance it = desk_instance(8, 2.0, 0.05, rng, 0.0);  // e = 0
      const double sigma = 0.25 * *it.lambda1_bin;
      auto [slr, tr] = flood_noise_instance(it, 136, 2, *it.lambda1_bin, sigma, rng);
      const double scale =
          std::sqrt((it.basis.matrix() * it.hidden->z.cast<double>()).squaredNorm() +
                    sigma * sigma);
      for (int i = 0; i < tr.params.m1; ++i) standardized.push_back(slr.y[i] / scale);
    }
    const double ks = ks_statistic(standardized, [](double v) { return normal_cdf(v); });
    CHECK(ks < ks_critical_value(standardized.size(), 0.01));
  }
}

TEST_CASE("flooding bound formula") {
  CHECK(flooding_tv_bound(0.0, 1.0) == 0.0);
  CHECK(flooding_tv_bound(1.0, 1.0) == 0.5);
  CHECK(flooding_tv_bound(1.0, 0.1) == 1.0);
  CHECK_THROWS_AS(flooding_tv_bound(-1.0, 1.0), PreconditionViolated);
}

TEST_CASE("reduction soundness by enumeration at desk scale") {
  RngEngine rng = make_engine(69);
  const int trials = 20;
  for (int trial = 0; trial < trials; ++trial) {
    const BinaryBddInstance inst = desk_instance(8, 2.0, 0.1, rng);
    auto [slr, tr] = build_slr_instance(inst, 136, 2, *inst.lambda1_bin, rng);
    const GadgetShape& shape = tr.params.shape;
    const double budget = slr.delta * slr.delta;
    for_each_snk_support(shape.n(), shape.k, [&](const std::vector<int>& support) {
      const PartiteSparseVector cand{shape.n(), shape.k, support};
      if (residual_mse(slr.x, cand.dense(), slr.y) <= budget)
        REQUIRE(decode_partite(cand, shape) == inst.hidden->z);
    });
  }
}
