#include "arecip/applications.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "arecip/constants.hpp"

namespace arecip {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

/// Deterministic per-(seed, trial, stream) generator; scheduling never affects results.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

enum Stream : std::uint64_t { kLmsStream = 1, kDataStream = 2, kReseedStream = 3 };

/// Run fn(i) for i in [0, n) across hardware threads. fn must only write slot i.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 32);
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t count = std::min(workers, n);
  pool.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += count) fn(i);
    });
  }
}

double coarse_real(double x) {
  const int z = std::ilogb(x);
  const double lower = std::ldexp(1.0, z);
  return x == lower ? 1.0 / lower : std::ldexp(1.0, -(z + 1));
}

double fixed_path(double x, const RecipConfig& cfg) {
  const double limit = std::ldexp(1.0, cfg.width);
  if (x < limit && x == std::floor(x)) {
    return fraction_value(recip_approx(cfg.word(static_cast<std::uint32_t>(x)), cfg));
  }
  // Normalize by 4^s so the operand exponent lands on m or m+1, m = (F-1)/2:
  // input truncation (2^-m relative) and output resolution (2^(m+2-F)) balance.
  const int m = (cfg.frac_bits() - 1) / 2;
  const int e = std::ilogb(x);
  const int num = m + 1 - e;
  const int s = num >= 0 ? num / 2 : -((-num + 1) / 2);
  const auto operand = static_cast<std::uint32_t>(std::floor(std::ldexp(x, 2 * s)));
  const double y = fraction_value(recip_approx(cfg.word(operand), cfg));
  return std::ldexp(y, 2 * s);
}

}  // namespace

Reciprocal Reciprocal::exact() { return Reciprocal(Exact{}); }
Reciprocal Reciprocal::approx(analytic::RealApprox model) { return Reciprocal(model); }
Reciprocal Reciprocal::approx_fixed(const RecipConfig& cfg) {
  cfg.validate();
  return Reciprocal(cfg);
}
Reciprocal Reciprocal::coarse() { return Reciprocal(Coarse{}); }

double Reciprocal::operator()(double x) const {
  if (!(x >= 1.0) || !std::isfinite(x)) throw DomainError("reciprocal operand must be finite and >= 1");
  return std::visit(Overloaded{
                        [&](const Exact&) { return 1.0 / x; },
                        [&](const analytic::RealApprox& m) { return m(x); },
                        [&](const RecipConfig& cfg) { return fixed_path(x, cfg); },
                        [&](const Coarse&) { return coarse_real(x); },
                    },
                    impl_);
}

double Reciprocal::scaled(double x) const {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("reciprocal operand must be finite and positive");
  if (x >= 1.0) return (*this)(x);
  // Smallest m with x * 4^m >= 1; the result then lies in [1, 4).
  const int e = std::ilogb(x);  // x in [2^e, 2^(e+1)), e < 0
  const int m = (-e + 1) / 2;
  return std::ldexp((*this)(std::ldexp(x, 2 * m)), 2 * m);
}

std::string Reciprocal::name() const {
  return std::visit(Overloaded{
                        [](const Exact&) { return std::string("exact"); },
                        [](const analytic::RealApprox& m) {
                          std::string c = m.c() == kCAlwaysAbove   ? "3"
                                          : m.c() == kCAlwaysBelow ? "2sqrt2"
                                          : m.c() == kCZeroMean    ? "26over9"
                                                                   : std::to_string(m.c());
                          return "approx(C=" + c + (m.mpe() ? ",mpe)" : ")");
                        },
                        [](const RecipConfig& cfg) {
                          return "approx_fixed(B=" + std::to_string(cfg.width) + ",C=" + cfg.c.label() +
                                 (cfg.mpe ? ",mpe)" : ")");
                        },
                        [](const Coarse&) { return std::string("coarse"); },
                    },
                    impl_);
}

// --- sparse LMS --------------------------------------------------------------

void SparseLmsConfig::validate() const {
  if (filter_length == 0) throw ConfigError("filter length must be positive");
  if (nonzeros > filter_length) throw ConfigError("nonzeros must not exceed the filter length");
  if (iterations == 0) throw ConfigError("iterations must be positive");
  if (trials == 0) throw ConfigError("trials must be >= 1");
  if (!(shrink_threshold > 0.0)) throw ConfigError("shrink threshold must be positive");
  if (!(noise_stddev >= 0.0)) throw ConfigError("noise standard deviation must be non-negative");
}

std::size_t LmsResult::iterations_to_reach(double level) const {
  for (std::size_t k = 0; k < mean_sq_error.size(); ++k) {
    if (mean_sq_error[k] <= level) return k + 1;
  }
  return npos;
}

double soft_threshold(double v, double lambda) {
  if (v > lambda) return v - lambda;
  if (v < -lambda) return v + lambda;
  return 0.0;
}

LmsResult sparse_lms_run(const SparseLmsConfig& cfg, const Reciprocal& recip) {
  cfg.validate();
  const std::size_t p = cfg.filter_length;
  std::vector<std::vector<double>> per_trial(cfg.trials);

  parallel_for(cfg.trials, [&](std::size_t trial) {
    auto rng = make_rng(cfg.seed, trial, kLmsStream);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    std::vector<double> h(p, 0.0);
    std::vector<std::size_t> taps(p);
    std::iota(taps.begin(), taps.end(), 0);
    std::shuffle(taps.begin(), taps.end(), rng);
    for (std::size_t i = 0; i < cfg.nonzeros; ++i) h[taps[i]] = gauss(rng);

    // signal[k + p - 1 - j] is tap j of regressor k (newest sample first).
    std::vector<double> signal(cfg.iterations + p - 1);
    for (double& s : signal) s = uniform(rng);

    std::vector<double> v(p, 0.0), w(p, 0.0), x(p);
    auto& errors = per_trial[trial];
    errors.resize(cfg.iterations);
    for (std::size_t k = 0; k < cfg.iterations; ++k) {
      for (std::size_t j = 0; j < p; ++j) x[j] = signal[k + p - 1 - j];
      double d = std::inner_product(h.begin(), h.end(), x.begin(), 0.0);
      if (cfg.noise_stddev > 0.0) d += cfg.noise_stddev * gauss(rng);

      const double energy = std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
      const double mu = energy > 0.0 ? recip.scaled(energy) : 0.0;
      const double e = d - std::inner_product(x.begin(), x.end(), w.begin(), 0.0);
      double dist = 0.0;
      for (std::size_t j = 0; j < p; ++j) {
        v[j] += mu * e * x[j];
        w[j] = soft_threshold(v[j], cfg.shrink_threshold);
        dist += (w[j] - h[j]) * (w[j] - h[j]);
      }
      errors[k] = dist;
    }
  });

  LmsResult result;
  result.mean_sq_error.assign(cfg.iterations, 0.0);
  for (const auto& errors : per_trial) {
    for (std::size_t k = 0; k < cfg.iterations; ++k) result.mean_sq_error[k] += errors[k];
  }
  for (double& e : result.mean_sq_error) e /= static_cast<double>(cfg.trials);
  return result;
}

// --- k-means -------------------------------------------------------------------

void KMeansConfig::validate() const {
  if (clusters == 0) throw ConfigError("cluster count must be >= 1");
  if (points_per_cluster == 0) throw ConfigError("points per cluster must be >= 1");
  if (grid_min > grid_max) throw ConfigError("center grid is empty");
  if (max_iters == 0) throw ConfigError("max_iters must be >= 1");
  if (trials == 0) throw ConfigError("trials must be >= 1");
  const auto [a, b, c, d] = covariance;
  if (b != c) throw ConfigError("covariance must be symmetric");
  if (!(a > 0.0) || !(a * d - b * c > 0.0)) throw ConfigError("covariance must be positive definite");
}

KMeansDataset make_dataset(const KMeansConfig& cfg, std::size_t trial) {
  cfg.validate();
  auto rng = make_rng(cfg.seed, trial, kDataStream);
  std::uniform_int_distribution<int> grid(cfg.grid_min, cfg.grid_max);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Cholesky factor of the 2x2 covariance.
  const double l11 = std::sqrt(cfg.covariance[0]);
  const double l21 = cfg.covariance[1] / l11;
  const double l22 = std::sqrt(cfg.covariance[3] - l21 * l21);

  KMeansDataset data;
  data.points.reserve(cfg.clusters * cfg.points_per_cluster);
  for (std::size_t k = 0; k < cfg.clusters; ++k) {
    const Point2 center{static_cast<double>(grid(rng)), static_cast<double>(grid(rng))};
    data.true_centers.push_back(center);
    for (std::size_t i = 0; i < cfg.points_per_cluster; ++i) {
      const double n1 = gauss(rng);
      const double n2 = gauss(rng);
      data.points.push_back({center.x + l11 * n1, center.y + l21 * n1 + l22 * n2});
    }
  }

  std::vector<std::size_t> order(data.points.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t k = 0; k < cfg.clusters; ++k) data.initial_centers.push_back(data.points[order[k]]);
  return data;
}

namespace {

double sq_dist(Point2 p, Point2 q) {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  return dx * dx + dy * dy;
}

void assign(std::span<const Point2> points, std::span<const Point2> centers, std::vector<std::size_t>& labels) {
  labels.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::size_t best = 0;
    double best_d = sq_dist(points[i], centers[0]);
    for (std::size_t k = 1; k < centers.size(); ++k) {
      const double dk = sq_dist(points[i], centers[k]);
      if (dk < best_d) {
        best_d = dk;
        best = k;
      }
    }
    labels[i] = best;
  }
}

}  // namespace

double ssd(std::span<const Point2> points, std::span<const Point2> centers, std::span<const std::size_t> labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) total += sq_dist(points[i], centers[labels[i]]);
  return total;
}

LloydResult lloyd(std::span<const Point2> points, std::span<const Point2> initial_centers,
                  const Reciprocal& recip, std::size_t max_iters, std::uint64_t reseed_seed) {
  if (points.empty() || initial_centers.empty()) throw ConfigError("lloyd needs points and centers");
  std::mt19937_64 reseed_rng(reseed_seed);
  std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);

  LloydResult r;
  r.centers.assign(initial_centers.begin(), initial_centers.end());
  const std::size_t k_count = r.centers.size();
  std::vector<std::size_t> labels;
  assign(points, r.centers, labels);

  std::vector<Point2> sums(k_count);
  std::vector<std::size_t> counts(k_count);
  std::vector<std::size_t> next;
  for (std::size_t it = 0; it < max_iters; ++it) {
    std::fill(sums.begin(), sums.end(), Point2{});
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      sums[labels[i]].x += points[i].x;
      sums[labels[i]].y += points[i].y;
      ++counts[labels[i]];
    }
    for (std::size_t k = 0; k < k_count; ++k) {
      if (counts[k] == 0) {
        r.centers[k] = points[pick(reseed_rng)];
        ++r.reseeds;
        continue;
      }
      const double inv = recip(static_cast<double>(counts[k]));
      r.centers[k] = {sums[k].x * inv, sums[k].y * inv};
    }
    r.ssd_trace.push_back(ssd(points, r.centers, labels));
    ++r.iterations;

    assign(points, r.centers, next);
    if (next == labels) break;
    if (it + 1 == max_iters) break;  // keep the labels that produced the final centers
    labels.swap(next);
  }
  r.labels = std::move(labels);
  r.ssd = r.ssd_trace.back();
  return r;
}

double r_ssd(double ssd_approx, double ssd_exact) {
  if (!(ssd_exact > 0.0)) throw DomainError("r_ssd is undefined for a non-positive exact SSD");
  return (ssd_approx - ssd_exact) / ssd_exact * 100.0;
}

KMeansResult kmeans_run(const KMeansConfig& cfg, const Reciprocal& recip) {
  cfg.validate();
  std::vector<double> exact(cfg.trials), approx(cfg.trials);
  const Reciprocal reference = Reciprocal::exact();

  parallel_for(cfg.trials, [&](std::size_t trial) {
    const KMeansDataset data = make_dataset(cfg, trial);
    const std::uint64_t reseed = make_rng(cfg.seed, trial, kReseedStream)();
    exact[trial] = lloyd(data.points, data.initial_centers, reference, cfg.max_iters, reseed).ssd;
    approx[trial] = lloyd(data.points, data.initial_centers, recip, cfg.max_iters, reseed).ssd;
  });

  KMeansResult result;
  result.r_ssd.resize(cfg.trials);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    result.r_ssd[t] = r_ssd(approx[t], exact[t]);
    result.ssd_exact_mean += exact[t];
    result.ssd_approx_mean += approx[t];
    result.r_ssd_mean += result.r_ssd[t];
  }
  const auto n = static_cast<double>(cfg.trials);
  result.ssd_exact_mean /= n;
  result.ssd_approx_mean /= n;
  result.r_ssd_mean /= n;
  return result;
}

// --- regression metrics --------------------------------------------------------

double sigmoid(double x, const Reciprocal& recip) {
  if (!std::isfinite(x)) throw DomainError("sigmoid input must be finite");
  return recip(1.0 + std::exp(-x));
}

double rmse(std::span<const double> y, std::span<const double> y_hat) {
  if (y.empty() || y.size() != y_hat.size()) throw ConfigError("rmse needs equal, non-empty inputs");
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) sum += (y[i] - y_hat[i]) * (y[i] - y_hat[i]);
  return std::sqrt(sum / static_cast<double>(y.size()));
}

double thresholded_accuracy(std::span<const double> y, std::span<const double> y_hat, double threshold) {
  if (y.empty() || y.size() != y_hat.size()) throw ConfigError("accuracy needs equal, non-empty inputs");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y.size(); ++i) hits += std::fabs(y[i] - y_hat[i]) <= threshold ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(y.size());
}

}  // namespace arecip
