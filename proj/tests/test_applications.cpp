#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "arecip/applications.hpp"
#include "arecip/constants.hpp"

using namespace arecip;

namespace {

Reciprocal approx(double c, bool mpe) { return Reciprocal::approx(analytic::RealApprox(c, mpe)); }

KMeansConfig small_kmeans(std::size_t k, std::size_t trials) {
  KMeansConfig cfg;
  cfg.clusters = k;
  cfg.trials = trials;
  cfg.seed = 42;
  return cfg;
}

SparseLmsConfig small_lms(std::size_t trials, std::size_t iterations) {
  SparseLmsConfig cfg;
  cfg.trials = trials;
  cfg.iterations = iterations;
  cfg.seed = 9;
  return cfg;
}

}  // namespace

TEST_CASE("reciprocal kinds") {
  const auto exact = Reciprocal::exact();
  CHECK(exact(4.0) == 0.25);
  CHECK(exact.name() == "exact");
  CHECK_THROWS_AS(exact(0.5), DomainError);
  CHECK_THROWS_AS(exact(INFINITY), DomainError);

  const auto coarse = Reciprocal::coarse();
  CHECK(coarse(1.0) == 1.0);
  CHECK(coarse(4.0) == 0.25);
  CHECK(coarse(5.0) == 0.125);
  CHECK(coarse(7.99) == 0.125);
  CHECK(coarse.name() == "coarse");

  const auto a = approx(kCAlwaysAbove, false);
  CHECK(a(3.0) == doctest::Approx(0.375));
  CHECK(a.name() == "approx(C=3)");
  CHECK(approx(kCZeroMean, true).name() == "approx(C=26over9,mpe)");

  const auto fixed = Reciprocal::approx_fixed({16, CVariant::always_above(), false, Version::V2});
  CHECK(fixed(3.0) == 0.375);
  CHECK(fixed.name() == "approx_fixed(B=16,C=3)");
}

TEST_CASE("fixed-point path tracks the real model for non-integer and large operands") {
  const RecipConfig cfg{20, CVariant::zero_mean(), true, Version::V1};
  const auto fixed = Reciprocal::approx_fixed(cfg);
  const auto real = approx(std::ldexp(static_cast<double>(cfg.c_fixed()), -cfg.frac_bits()), true);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> exponent(0.0, 40.0);
  for (int i = 0; i < 5000; ++i) {
    const double x = std::exp2(exponent(rng));
    const double yf = fixed(x);
    const double yr = real(x);
    // m = 9: truncation 2^-9 relative, output resolution 2^-19 on y <= 2^-9
    REQUIRE(std::fabs(x * yf - x * yr) <= std::ldexp(1.0, -9) + std::ldexp(1.0, -8));
  }
}

TEST_CASE("scaled reciprocal and the scaling contract") {
  const auto a = approx(kCAlwaysBelow, false);
  CHECK(a.scaled(0.25) == a(1.0) * 4.0);
  CHECK(a.scaled(0.3) == a(1.2) * 4.0);
  CHECK_THROWS_AS(a.scaled(0.0), DomainError);
  CHECK_THROWS_AS(a.scaled(-1.0), DomainError);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(1e-6, 200.0);
  for (int i = 0; i < 10000; ++i) {
    const double x = u(rng);
    for (int m = 1; m < 6; ++m) {
      const double s = std::ldexp(1.0, 2 * m);
      REQUIRE(a.scaled(x / s) == a.scaled(x) * s);
    }
    const double r = x * a.scaled(x) - 1.0;
    REQUIRE(r <= 1e-15);
    REQUIRE(r >= kCAlwaysBelow - 3.0 - 1e-12);
  }
  const auto e = Reciprocal::exact();
  CHECK(e.scaled(0.1) == doctest::Approx(10.0).epsilon(1e-15));
}

TEST_CASE("sigmoid examples") {
  CHECK(sigmoid(0.0, Reciprocal::exact()) == 0.5);
  CHECK(sigmoid(0.0, approx(kCAlwaysAbove, false)) == 0.5);
  CHECK(sigmoid(0.0, approx(kCZeroMean, false)) == doctest::Approx(17.0 / 36.0).epsilon(1e-12));
  CHECK(sigmoid(0.0, approx(kCZeroMean, false)) / 0.5 - 1.0 == doctest::Approx(-1.0 / 18.0).epsilon(1e-9));
}

TEST_CASE("sigmoid relative-error transfer") {
  const auto exact = Reciprocal::exact();
  for (bool mpe : {false, true}) {
    for (double c : {kCAlwaysAbove, kCAlwaysBelow, kCZeroMean}) {
      const auto a = approx(c, mpe);
      for (double x = -8.0; x <= 8.0; x += 0.01) {
        const double operand = 1.0 + std::exp(-x);
        const double transfer = sigmoid(x, a) / sigmoid(x, exact) - 1.0;
        REQUIRE(std::fabs(transfer - analytic::rel_error(operand, c, mpe)) < 1e-12);
        if (c == kCZeroMean && mpe) REQUIRE(std::fabs(transfer) <= 1.0 / 18.0 + 1e-9);
      }
    }
  }
}

TEST_CASE("rmse and thresholded accuracy") {
  const std::vector<double> zeros{0.0, 0.0}, three_four{3.0, 4.0};
  CHECK(rmse(zeros, three_four) == doctest::Approx(std::sqrt(12.5)));
  CHECK(rmse(std::vector<double>{1.0}, std::vector<double>{2.0}) == 1.0);
  CHECK(rmse(three_four, three_four) == 0.0);
  CHECK_THROWS_AS(rmse(zeros, std::vector<double>{1.0}), ConfigError);
  CHECK_THROWS_AS(rmse(std::vector<double>{}, std::vector<double>{}), ConfigError);
  CHECK(thresholded_accuracy(zeros, three_four, 3.5) == 0.5);
  CHECK(thresholded_accuracy(zeros, three_four, 4.0) == 1.0);
  CHECK_THROWS_AS(thresholded_accuracy(zeros, std::vector<double>{1.0}, 1.0), ConfigError);
}

TEST_CASE("r_ssd") {
  CHECK(r_ssd(110.0, 100.0) == doctest::Approx(10.0));
  CHECK(r_ssd(100.0, 100.0) == 0.0);
  CHECK_THROWS_AS(r_ssd(1.0, 0.0), DomainError);
  CHECK(r_ssd(0.0, 5.0) == -100.0);
}

TEST_CASE("soft threshold") {
  CHECK(soft_threshold(3.0, 1.0) == 2.0);
  CHECK(soft_threshold(-3.0, 1.0) == -2.0);
  CHECK(soft_threshold(0.5, 1.0) == 0.0);
  CHECK(soft_threshold(-1.0, 1.0) == 0.0);
}

TEST_CASE("k-means config validation") {
  KMeansConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.clusters = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = KMeansConfig{};
  cfg.covariance = {1.0, 2.0, 2.0, 1.0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = KMeansConfig{};
  cfg.covariance = {1.0, 0.1, 0.2, 1.0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = KMeansConfig{};
  cfg.trials = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("dataset layout") {
  const auto cfg = small_kmeans(4, 1);
  const auto d = make_dataset(cfg, 0);
  CHECK(d.points.size() == 400);
  CHECK(d.true_centers.size() == 4);
  CHECK(d.initial_centers.size() == 4);
  for (const auto& c : d.true_centers) {
    CHECK(c.x == std::round(c.x));
    CHECK(c.x >= -4.0);
    CHECK(c.y <= 4.0);
  }
  const auto again = make_dataset(cfg, 0);
  for (std::size_t i = 0; i < d.points.size(); ++i) {
    REQUIRE(d.points[i].x == again.points[i].x);
    REQUIRE(d.points[i].y == again.points[i].y);
  }
  const auto other = make_dataset(cfg, 1);
  CHECK(other.points[0].x != d.points[0].x);
}

TEST_CASE("Lloyd with the exact reciprocal never increases the SSD") {
  for (std::size_t k : {2, 5, 9}) {
    const auto cfg = small_kmeans(k, 1);
    for (std::size_t trial = 0; trial < 20; ++trial) {
      const auto d = make_dataset(cfg, trial);
      const auto r = lloyd(d.points, d.initial_centers, Reciprocal::exact(), cfg.max_iters, trial);
      REQUIRE(!r.ssd_trace.empty());
      for (std::size_t i = 1; i < r.ssd_trace.size(); ++i) {
        if (r.reseeds == 0) REQUIRE(r.ssd_trace[i] <= r.ssd_trace[i - 1] * (1.0 + 1e-12));
      }
      CHECK(r.ssd == doctest::Approx(ssd(d.points, r.centers, r.labels)));
      CHECK(r.labels.size() == d.points.size());
    }
  }
}

TEST_CASE("degenerate clusters") {
  const std::vector<Point2> pts{{1.5, -2.0}, {1.5, -2.0}, {1.5, -2.0}, {1.5, -2.0}};
  const std::vector<Point2> init{{0.0, 0.0}};
  for (const auto& recip : {Reciprocal::exact(), approx(kCAlwaysAbove, false), Reciprocal::coarse()}) {
    const auto r = lloyd(pts, init, recip, 10, 0);
    // 4 is a power of two, so every kind returns 1/4 exactly.
    CHECK(r.centers[0].x == 1.5);
    CHECK(r.centers[0].y == -2.0);
    CHECK(r.ssd == 0.0);
  }
  const std::vector<Point2> single{{3.0, 7.0}};
  for (const auto& recip : {approx(kCAlwaysAbove, false), Reciprocal::coarse()}) {
    const auto r = lloyd(single, init, recip, 10, 0);
    CHECK(r.centers[0].x == 3.0);
    CHECK(r.centers[0].y == 7.0);
  }
}

TEST_CASE("empty clusters are re-seeded from a data point") {
  const std::vector<Point2> pts{{0.0, 0.0}, {0.1, 0.0}, {10.0, 10.0}, {10.1, 10.0}};
  const std::vector<Point2> init{{0.0, 0.0}, {100.0, 100.0}, {-100.0, -100.0}};
  const auto r = lloyd(pts, init, Reciprocal::exact(), 50, 7);
  CHECK(r.reseeds > 0);
  for (const auto& c : r.centers) CHECK(std::isfinite(c.x));
  CHECK(r.ssd < 1.0);
}

TEST_CASE("k-means run is deterministic and sane") {
  const auto cfg = small_kmeans(3, 8);
  const auto a = kmeans_run(cfg, approx(kCZeroMean, true));
  const auto b = kmeans_run(cfg, approx(kCZeroMean, true));
  REQUIRE(a.r_ssd.size() == 8);
  for (std::size_t i = 0; i < a.r_ssd.size(); ++i) CHECK(a.r_ssd[i] == b.r_ssd[i]);
  CHECK(a.r_ssd_mean == b.r_ssd_mean);
  CHECK(a.ssd_exact_mean > 0.0);
  for (double r : a.r_ssd) CHECK(r >= -100.0);
  const auto same = kmeans_run(cfg, Reciprocal::exact());
  CHECK(same.r_ssd_mean == 0.0);
}

TEST_CASE("sparse LMS config validation") {
  SparseLmsConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.nonzeros = 31;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SparseLmsConfig{};
  cfg.trials = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SparseLmsConfig{};
  cfg.shrink_threshold = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("sparse LMS with the exact step converges") {
  const auto r = sparse_lms_run(small_lms(20, 1200), Reciprocal::exact());
  REQUIRE(r.mean_sq_error.size() == 1200);
  for (double e : r.mean_sq_error) REQUIRE(std::isfinite(e));
  const auto& t = r.mean_sq_error;
  auto window = [&](std::size_t from) {
    double s = 0.0;
    for (std::size_t i = from; i < from + 100; ++i) s += t[i];
    return s / 100.0;
  };
  CHECK(window(100) < window(0));
  CHECK(window(500) < window(100));
  CHECK(window(1100) < window(500));
  CHECK(r.final_error() < 0.1 * t.front());
}

TEST_CASE("sparse LMS is deterministic in the seed") {
  const auto cfg = small_lms(6, 200);
  const auto a = sparse_lms_run(cfg, approx(kCAlwaysBelow, false));
  const auto b = sparse_lms_run(cfg, approx(kCAlwaysBelow, false));
  CHECK(a.mean_sq_error == b.mean_sq_error);
  auto other = cfg;
  other.seed = 10;
  CHECK(sparse_lms_run(other, approx(kCAlwaysBelow, false)).mean_sq_error != a.mean_sq_error);
}

TEST_CASE("iterations_to_reach") {
  LmsResult r;
  r.mean_sq_error = {5.0, 3.0, 2.0, 1.0};
  CHECK(r.iterations_to_reach(3.0) == 2);
  CHECK(r.iterations_to_reach(0.5) == LmsResult::npos);
  CHECK(r.iterations_to_reach(10.0) == 1);
  CHECK(r.final_error() == 1.0);
}
