#include "arecip/analytic.hpp"

#include <cmath>
#include <numbers>

namespace arecip::analytic {

namespace {

void require_domain(double x) {
  if (!(x >= 1.0) || !std::isfinite(x)) throw DomainError("reciprocal model requires finite x >= 1");
}

}  // namespace

int octave(double x) {
  require_domain(x);
  return std::ilogb(x);
}

double y_l_real(double x, double c) {
  const int z = octave(x);
  return (c - std::ldexp(x, -z)) * std::ldexp(1.0, -(z + 1));
}

double y_l_mpe_real(double x, double c) {
  const int z = octave(x);
  return std::fmax(y_l_real(x, c), std::ldexp(1.0, -(z + 1)));
}

double rel_error(double x, double c, bool mpe) {
  const double y = mpe ? y_l_mpe_real(x, c) : y_l_real(x, c);
  return x * y - 1.0;
}

double avg_rel_error(double c) { return 0.75 * c - 13.0 / 6.0; }

double c_for_zero_avg() { return 26.0 / 9.0; }

double empirical_avg_rel_error(double c, int z, std::size_t n_samples, bool mpe) {
  if (n_samples < 2) throw ConfigError("empirical_avg_rel_error needs at least 2 samples");
  if (z < 0) throw ConfigError("octave index must be non-negative");
  const double lo = std::ldexp(1.0, z);
  const double step = lo / static_cast<double>(n_samples);
  double sum = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    sum += rel_error(lo + (static_cast<double>(i) + 0.5) * step, c, mpe);
  }
  return sum / static_cast<double>(n_samples);
}

ErrorFigures error_figures(double c, int z) {
  if (z < 0) throw ConfigError("octave index must be non-negative");
  ErrorFigures f;
  f.c = c;
  f.z = z;
  f.r_avg = avg_rel_error(c);
  f.r_max_pos = c * c / 8.0 - 1.0;
  f.r_border = c - 3.0;
  f.x_star = std::ldexp(std::numbers::sqrt2, z);
  f.e_max_abs = (c - 2.0 * std::numbers::sqrt2) * std::ldexp(1.0, -(z + 1));
  f.x_argmax_rel = c * std::ldexp(1.0, z - 1);
  f.x_clip = (c - 1.0) * std::ldexp(1.0, z);
  f.r_clip = (c - 3.0) / 2.0;
  return f;
}

RealApprox::RealApprox(double c, bool mpe) : c_(c), mpe_(mpe) {
  if (!std::isfinite(c) || c <= 2.0 || c > 3.0) throw ConfigError("C must lie in (2, 3]");
}

}  // namespace arecip::analytic
