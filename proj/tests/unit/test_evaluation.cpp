#include <doctest.h>

#include <cmath>
#include <random>

#include "medsim/error.hpp"
#include "medsim/evaluation.hpp"
#include "oracles.hpp"

using namespace medsim;

TEST_CASE("pearson of a perfect linear relation") {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  std::vector<double> y;
  for (double v : x) y.push_back(2 * v + 1);
  CHECK(metrics::pearson(x, y) == doctest::Approx(1.0));
  for (auto& v : y) v = -v;
  CHECK(metrics::pearson(x, y) == doctest::Approx(-1.0));
}

TEST_CASE("pearson worked example 0.8") {
  const std::vector<double> x = {1, 2, 3, 4};
  const std::vector<double> y = {1, 3, 2, 4};
  const double got = metrics::pearson(x, y);
  CHECK(got == doctest::Approx(0.8));
  CHECK(oracle::rel_err(got, oracle::pearson(x, y)) < 1e-12);
}

TEST_CASE("pearson error paths") {
  const std::vector<double> x = {1, 2, 3};
  try {
    metrics::pearson(x, std::vector<double>{1, 2});
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == errc::length_mismatch);
  }
  try {
    metrics::pearson(x, std::vector<double>{5, 5, 5});
    FAIL("expected ConstantInput");
  } catch (const Error& e) {
    CHECK(e.code() == errc::constant_input);
  }
  try {
    metrics::pearson(std::vector<double>{1}, std::vector<double>{1});
    FAIL("expected LengthMismatch for n=1");
  } catch (const Error& e) {
    CHECK(e.code() == errc::length_mismatch);
  }
}

TEST_CASE("spearman is 1 for any strictly monotone map and -1 reversed") {
  const std::vector<double> x = {0.1, 0.7, 2.0, 3.5, 9.0};
  std::vector<double> y;
  for (double v : x) y.push_back(std::exp(v));
  CHECK(metrics::spearman(x, y) == doctest::Approx(1.0));
  std::vector<double> rev(y.rbegin(), y.rend());
  CHECK(metrics::spearman(x, rev) == doctest::Approx(-1.0));
}

TEST_CASE("spearman tie handling matches the average-rank oracle") {
  const std::vector<double> x = {1, 2, 2, 3};
  const std::vector<double> y = {4, 2, 5, 1};
  CHECK(std::abs(metrics::spearman(x, y) - oracle::spearman(x, y)) < 1e-12);

  auto ranks = metrics::average_ranks(x);
  CHECK(ranks == std::vector<double>{1.0, 2.5, 2.5, 4.0});
}

TEST_CASE("spearman equals pearson of average ranks by construction") {
  std::mt19937_64 rng(61);
  for (int round = 0; round < 100; ++round) {
    std::vector<double> x, y;
    const int n = 3 + static_cast<int>(rng() % 20);
    for (int i = 0; i < n; ++i) {
      x.push_back(static_cast<double>(rng() % 10));
      y.push_back(static_cast<double>(rng() % 10));
    }
    auto rx = metrics::average_ranks(x);
    auto ry = metrics::average_ranks(y);
    try {
      const double s = metrics::spearman(x, y);
      CHECK(s == metrics::pearson(rx, ry));
    } catch (const Error& e) {
      CHECK(e.code() == errc::constant_input);
    }
  }
}

TEST_CASE("rmse and mae on known residuals") {
  CHECK(metrics::rmse_mae(std::vector<double>{1, 2}, std::vector<double>{1, 2}) ==
        std::pair<double, double>{0.0, 0.0});

  auto [rmse_c, mae_c] =
      metrics::rmse_mae(std::vector<double>{0.6, 0.7}, std::vector<double>{0.4, 0.5});
  CHECK(rmse_c == doctest::Approx(0.2));
  CHECK(mae_c == doctest::Approx(0.2));

  auto [rmse, mae] =
      metrics::rmse_mae(std::vector<double>{0.6, 0.2}, std::vector<double>{0.5, 0.5});
  CHECK(rmse == doctest::Approx(std::sqrt(0.05)));
  CHECK(mae == doctest::Approx(0.2));
}

TEST_CASE("rmse is at least mae for any residual vector") {
  std::mt19937_64 rng(67);
  for (int round = 0; round < 200; ++round) {
    std::vector<double> pred, gold;
    const int n = 1 + static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) {
      pred.push_back(static_cast<double>(rng() % 1000) / 1000.0);
      gold.push_back(static_cast<double>(rng() % 1000) / 1000.0);
    }
    auto [rmse, mae] = metrics::rmse_mae(pred, gold);
    CHECK(rmse >= mae - 1e-15);
    auto [ormse, omae] = oracle::rmse_mae(pred, gold);
    CHECK(oracle::rel_err(rmse + 1.0, ormse + 1.0) < 1e-12);
    CHECK(oracle::rel_err(mae + 1.0, omae + 1.0) < 1e-12);
  }
}

TEST_CASE("identical predictions of the mean give rmse equal to the population sd") {
  const std::vector<double> gold = {0.1, 0.4, 0.7, 0.9, 0.3};
  double mean = 0.0;
  for (double g : gold) mean += g;
  mean /= static_cast<double>(gold.size());
  std::vector<double> pred(gold.size(), mean);
  auto [rmse, mae] = metrics::rmse_mae(pred, gold);
  (void)mae;
  double var = 0.0;
  for (double g : gold) var += (g - mean) * (g - mean);
  var /= static_cast<double>(gold.size());
  CHECK(rmse == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
}

TEST_CASE("z_compare of equal correlations is zero with p=1") {
  auto z = metrics::z_compare(0.4, 0.4, 100);
  CHECK(z.z == 0.0);
  CHECK(z.p == doctest::Approx(1.0));
  CHECK(!z.significant);
}

TEST_CASE("z_compare worked example") {
  auto z = metrics::z_compare(0.9, 0.1, 103);
  CHECK(z.z == doctest::Approx(9.70).epsilon(1e-3));
  CHECK(z.p < 1e-20);
  CHECK(z.significant);
  auto o = oracle::z_compare(0.9, 0.1, 103);
  CHECK(oracle::rel_err(z.z, o.z) < 1e-12);
}

TEST_CASE("z_compare guards its domain") {
  try {
    metrics::z_compare(0.5, 0.4, 3);
    FAIL("expected DegenerateN");
  } catch (const Error& e) {
    CHECK(e.code() == errc::degenerate_n);
  }
  try {
    metrics::z_compare(1.0, 0.4, 10);
    FAIL("expected InvalidArgument");
  } catch (const Error& e) {
    CHECK(e.code() == errc::invalid_argument);
  }
}

TEST_CASE("z_compare is antisymmetric") {
  std::mt19937_64 rng(71);
  for (int round = 0; round < 100; ++round) {
    const double r1 = (static_cast<double>(rng() % 1999) - 999.0) / 1000.0;
    const double r2 = (static_cast<double>(rng() % 1999) - 999.0) / 1000.0;
    const size_t n = 4 + rng() % 500;
    CHECK(metrics::z_compare(r1, r2, n).z == -metrics::z_compare(r2, r1, n).z);
  }
}

TEST_CASE("correlations are invariant under positive affine transforms") {
  std::mt19937_64 rng(73);
  for (int round = 0; round < 100; ++round) {
    std::vector<double> x, y;
    const int n = 4 + static_cast<int>(rng() % 20);
    for (int i = 0; i < n; ++i) {
      x.push_back(static_cast<double>(rng() % 1000) / 100.0);
      y.push_back(static_cast<double>(rng() % 1000) / 100.0);
    }
    x[0] += 1e-3;  // avoid accidental constants
    y[0] += 2e-3;
    const double a = 0.5 + static_cast<double>(rng() % 100) / 25.0;
    const double b = static_cast<double>(rng() % 100) - 50.0;
    std::vector<double> xt;
    for (double v : x) xt.push_back(a * v + b);
    try {
      CHECK(std::abs(metrics::pearson(x, y) - metrics::pearson(xt, y)) < 1e-12);
      CHECK(std::abs(metrics::spearman(x, y) - metrics::spearman(xt, y)) < 1e-12);
    } catch (const Error& e) {
      CHECK(e.code() == errc::constant_input);
    }
  }
}

TEST_CASE("compute_report tolerates constant predictions") {
  auto report = metrics::compute_report(std::vector<double>{0.5, 0.5, 0.5},
                                        std::vector<double>{0.1, 0.5, 0.9});
  CHECK(!report.pearson.has_value());
  CHECK(!report.spearman.has_value());
  CHECK(report.n == 3);
  CHECK(report.rmse > 0.0);
}
