#include "mlcd/error.hpp"
#include "mlcd/nullmodels.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace mlcd;
using testutil::graph_t1;
using testutil::make_graph;

TEST_CASE("fit_id") {
  const auto pair = make_graph(2, 1, {{0, 0, 1, 1.0}});
  const auto p = fit_id(pair);
  CHECK(p.theta_id(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(p.rate(0, 1, 0) == doctest::Approx(0.5));
  const auto g = make_graph(3, 1, {{0, 0, 1, 1.0}});
  CHECK(fit_id(g).theta_id(2, 0) == 0.0);
  Rng rng(1);
  const auto r = testutil::random_graph(rng, 20, 3, 0.2);
  const auto fitted = fit_id(r);
  for (Index m = 0; m < 3; ++m) {
    CHECK(fitted.theta_id.col(m).sum() == doctest::Approx(std::sqrt(r.layer_totals()(m))));
  }
  std::vector<SparseLayer> layers{pair.layer(0), SparseLayer(2, 2)};
  CHECK_THROWS_AS(fit_id(MultiLayerGraph(layers)), PreconditionError);
}

TEST_CASE("fit_sd") {
  const auto g = graph_t1();
  const auto p = fit_sd(g);
  CHECK(p.beta(0) == doctest::Approx(0.6));
  CHECK(p.beta(1) == doctest::Approx(0.4));
  CHECK(p.beta.sum() == doctest::Approx(1.0).epsilon(1e-12));
  // node 1 has degrees (2, 1) and 2L = 10
  CHECK(p.theta_sd(0) == doctest::Approx(3.0 / std::sqrt(10.0)));
  CHECK(p.theta_sd.sum() == doctest::Approx(std::sqrt(10.0)));
  const auto single = make_graph(3, 1, {{0, 0, 1, 1.0}, {0, 1, 2, 2.0}});
  const auto a = fit_sd(single);
  const auto b = fit_id(single);
  CHECK(a.beta(0) == 1.0);
  CHECK(a.theta_sd.isApprox(b.theta_id.col(0)));
}

TEST_CASE("log-likelihoods") {
  const auto pair = make_graph(3, 1, {{0, 0, 1, 1.0}});
  CHECK(loglik_id(pair) == doctest::Approx(2.0 * std::log(1.0 / std::sqrt(2.0)) - 1.0));
  CHECK(loglik_id(pair) == doctest::Approx(loglik_sd(pair)));
  CHECK(lrt_statistic(pair) == 0.0);

  const auto g = graph_t1();
  const auto dense = oracle::dense_layers(g);
  CHECK(loglik_id(g) == doctest::Approx(oracle::lambda1(dense)));
  CHECK(loglik_sd(g) == doctest::Approx(oracle::lambda2(dense)));
  CHECK(lrt_statistic(g) >= -1e-9);

  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = testutil::random_graph(rng, 15, 1 + trial % 4, 0.25);
    const auto d = oracle::dense_layers(r);
    CHECK(loglik_id(r) == doctest::Approx(oracle::lambda1(d)).epsilon(1e-12));
    CHECK(loglik_sd(r) == doctest::Approx(oracle::lambda2(d)).epsilon(1e-12));
    CHECK(lrt_statistic(r) >= -1e-9);
  }
}

TEST_CASE("degrees of freedom and chi-square tail") {
  CHECK(lrt_degrees_of_freedom(29, 3) == 56.0);
  CHECK(lrt_degrees_of_freedom(253, 2) == 252.0);
  CHECK(chi_square_sf(0.0, 5.0) == 1.0);
  CHECK(chi_square_sf(3.0, 0.0) == 1.0);
  // P(X >= 3.841459) = 0.05 for one degree of freedom
  CHECK(chi_square_sf(3.841458820694124, 1.0) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(chi_square_sf(2.0, 2.0) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("null sampling") {
  NullParams zero;
  zero.variant = DegreeSharing::Shared;
  zero.theta_sd = Eigen::VectorXd::Zero(5);
  zero.beta = Eigen::VectorXd::Constant(2, 0.5);
  CHECK(sample_from_null(zero, 5, 2, 1).grand_total() == 0.0);
  CHECK_THROWS_AS(sample_from_null(zero, 6, 2, 1), InputError);

  NullParams bad = zero;
  bad.theta_sd(0) = -1.0;
  bad.theta_sd(1) = 1.0;
  CHECK_THROWS_AS(sample_from_null(bad, 5, 2, 1), InputError);

  NullParams sd;
  sd.variant = DegreeSharing::Shared;
  Rng rng(3);
  std::uniform_real_distribution<double> unit(0.2, 1.5);
  sd.theta_sd.resize(20);
  for (Index i = 0; i < 20; ++i) sd.theta_sd(i) = unit(rng);
  sd.beta = Eigen::Vector2d(0.7, 0.3);

  const auto a = sample_from_null(sd, 20, 2, 42);
  const auto b = sample_from_null(sd, 20, 2, 42);
  CHECK(a.degrees() == b.degrees());
  for (Index m = 0; m < 2; ++m) CHECK(a.layer(m).diagonal().isZero());

  for (Index m = 0; m < 2; ++m) {
    double expected = 0.0;
    for (Index i = 0; i < 20; ++i) {
      for (Index j = 0; j < 20; ++j) {
        if (i != j) expected += sd.rate(i, j, m);
      }
    }
    constexpr int reps = 500;
    double sum = 0.0, sum_sq = 0.0;
    for (int r = 0; r < reps; ++r) {
      const double t = sample_from_null(sd, 20, 2, derive_seed(7, r)).layer_totals()(m);
      sum += t;
      sum_sq += t * t;
    }
    const double mean = sum / reps;
    const double se = std::sqrt((sum_sq / reps - mean * mean) / reps);
    CHECK(std::abs(mean - expected) <= 3.0 * se);
  }
}

TEST_CASE("bootstrap") {
  const auto single = make_graph(4, 1, {{0, 0, 1, 1.0}, {0, 1, 2, 1.0}, {0, 2, 3, 1.0}});
  const auto r1 = bootstrap_lrt(single, 20, 1);
  CHECK(r1.statistic == 0.0);
  CHECK(r1.p_boot == 1.0);

  Rng rng(12);
  const auto g = testutil::random_graph(rng, 25, 3, 0.3);
  const auto a = bootstrap_lrt(g, 40, 9, 1);
  const auto b = bootstrap_lrt(g, 40, 9, 4);
  CHECK(a.boot_stats == b.boot_stats);
  CHECK(a.p_boot == b.p_boot);
  std::size_t exceed = 0;
  for (double s : a.boot_stats) exceed += s >= a.statistic;
  CHECK(a.p_boot == doctest::Approx((1.0 + exceed) / 41.0));
  CHECK(a.df == 25.0 * 3.0 - (25.0 + 3.0 - 1.0));
  CHECK(a.p_chi2 >= 0.0);
  CHECK(a.p_chi2 <= 1.0);
  CHECK_THROWS_AS(bootstrap_lrt(g, 0, 1), InputError);
}
