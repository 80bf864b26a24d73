#pragma once

// Downstream benchmarks that swap the exact reciprocal for an approximation:
// sparse LMS system identification, k-means clustering and the sigmoid.

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "arecip/analytic.hpp"
#include "arecip/fixedpoint.hpp"

namespace arecip {

/// A scalar reciprocal: exact, the piecewise-linear approximation (real-valued
/// or through the B-bit datapath), or the 2^-ceil(log2 x) baseline.
class Reciprocal {
 public:
  static Reciprocal exact();
  static Reciprocal approx(analytic::RealApprox model);
  static Reciprocal approx_fixed(const RecipConfig& cfg);
  static Reciprocal coarse();

  /// Reciprocal of x >= 1. Throws DomainError below 1.
  ///
  /// The fixed-point path feeds integers below 2^B straight to the datapath;
  /// any other x is first scaled by an even power of two into [2^m, 2^(m+2)),
  /// m = (B-2)/2, truncated to an integer, and the result is scaled back.
  double operator()(double x) const;

  /// Reciprocal of any x > 0: operands below 1 are scaled by 4^m into [1, 4)
  /// and the result is multiplied by 4^m. Exact in binary arithmetic.
  double scaled(double x) const;

  std::string name() const;

 private:
  struct Exact {};
  struct Coarse {};
  using Impl = std::variant<Exact, analytic::RealApprox, RecipConfig, Coarse>;

  explicit Reciprocal(Impl impl) : impl_(std::move(impl)) {}

  Impl impl_;
};

// --- sparse LMS --------------------------------------------------------------

struct SparseLmsConfig {
  std::size_t filter_length = 30;
  std::size_t nonzeros = 3;
  std::size_t iterations = 1200;
  std::size_t trials = 200;
  double shrink_threshold = 1.0;
  double noise_stddev = 0.0;  // additive Gaussian noise on the desired signal
  std::uint64_t seed = 0;

  void validate() const;
};

struct LmsResult {
  /// mean over trials of ||w(k) - h||^2 after update k = 1..iterations.
  std::vector<double> mean_sq_error;

  double final_error() const { return mean_sq_error.empty() ? 0.0 : mean_sq_error.back(); }

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  /// Smallest update count k with mean_sq_error[k-1] <= level, or npos.
  std::size_t iterations_to_reach(double level) const;
};

/// Linearized-Bregman sparse LMS with step mu_k = recip(||x_k||^2):
///   v += mu_k (d_k - x_k^T w) x_k,  w = soft_threshold(v, lambda).
/// The regressor is a tapped delay line over a uniform [0, 1) input signal.
LmsResult sparse_lms_run(const SparseLmsConfig& cfg, const Reciprocal& recip);

double soft_threshold(double v, double lambda);

// --- k-means -------------------------------------------------------------------

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct KMeansConfig {
  std::size_t clusters = 3;
  std::size_t points_per_cluster = 100;
  int grid_min = -4;
  int grid_max = 4;
  std::array<double, 4> covariance{0.5, 0.05, 0.05, 0.5};  // row-major 2x2
  std::size_t max_iters = 100;
  std::size_t trials = 200;
  std::uint64_t seed = 0;

  void validate() const;
};

struct KMeansDataset {
  std::vector<Point2> points;
  std::vector<Point2> true_centers;
  std::vector<Point2> initial_centers;  // shared by every reciprocal kind
};

/// Deterministic in (cfg.seed, trial).
KMeansDataset make_dataset(const KMeansConfig& cfg, std::size_t trial);

struct LloydResult {
  std::vector<Point2> centers;
  std::vector<std::size_t> labels;
  double ssd = 0.0;
  std::vector<double> ssd_trace;  // SSD after each center update
  std::size_t iterations = 0;
  std::size_t reseeds = 0;
};

/// Lloyd iterations until the assignment stops changing or max_iters. Centers
/// are recip(|C_k|) * sum(v_i); an empty cluster takes a random data point
/// drawn from a stream seeded by reseed_seed.
LloydResult lloyd(std::span<const Point2> points, std::span<const Point2> initial_centers,
                  const Reciprocal& recip, std::size_t max_iters, std::uint64_t reseed_seed);

double ssd(std::span<const Point2> points, std::span<const Point2> centers,
           std::span<const std::size_t> labels);

/// (ssd_approx - ssd_exact) / ssd_exact * 100. Throws DomainError when ssd_exact <= 0.
double r_ssd(double ssd_approx, double ssd_exact);

struct KMeansResult {
  double ssd_exact_mean = 0.0;
  double ssd_approx_mean = 0.0;
  double r_ssd_mean = 0.0;       // percent
  std::vector<double> r_ssd;     // per trial, percent
};

/// Runs every trial with the exact reciprocal and with `recip` from identical
/// data and initial centers.
KMeansResult kmeans_run(const KMeansConfig& cfg, const Reciprocal& recip);

// --- regression metrics --------------------------------------------------------

/// recip(1 + e^-x). The operand always lies in (1, inf).
double sigmoid(double x, const Reciprocal& recip);

/// Throws ConfigError on empty or mismatched inputs.
double rmse(std::span<const double> y, std::span<const double> y_hat);

/// Fraction of |y - y_hat| <= threshold.
double thresholded_accuracy(std::span<const double> y, std::span<const double> y_hat, double threshold);

}  // namespace arecip
