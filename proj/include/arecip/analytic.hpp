#pragma once

// Real-valued reference model of the piecewise-linear reciprocal and its
// closed-form error figures. Double precision throughout.

#include <cstddef>

#include "arecip/errors.hpp"

namespace arecip::analytic {

/// floor(log2 x) for x >= 1.
int octave(double x);

/// (c - x * 2^-z) * 2^-(z+1), z = floor(log2 x). Throws DomainError for x < 1.
double y_l_real(double x, double c);

/// max(y_l_real(x, c), 2^-(z+1)).
double y_l_mpe_real(double x, double c);

/// r(x, c) = x * y - 1, with y the MPE variant when mpe is set.
double rel_error(double x, double c, bool mpe);

/// Mean of r over one octave: 3c/4 - 13/6.
double avg_rel_error(double c);

/// Root of avg_rel_error: 26/9.
double c_for_zero_avg();

/// Midpoint-rule mean of rel_error over [2^z, 2^(z+1)) with n samples (n >= 2).
double empirical_avg_rel_error(double c, int z, std::size_t n_samples, bool mpe = false);

struct ErrorFigures {
  double c = 0.0;
  int z = 0;
  double r_avg = 0.0;         // 3c/4 - 13/6
  double r_max_pos = 0.0;     // c^2/8 - 1, attained at x_argmax_rel
  double r_border = 0.0;      // c - 3, limit at 2^(z+1) from the left
  double x_star = 0.0;        // 2^((2z+1)/2), argmax of the absolute error
  double e_max_abs = 0.0;     // (c - 2 sqrt 2) * 2^-(z+1), absolute error at x_star
  double x_argmax_rel = 0.0;  // c * 2^(z-1)
  double x_clip = 0.0;        // (c - 1) * 2^z, first point clipped by MPE
  double r_clip = 0.0;        // (c - 3) / 2, relative error at x_clip
};

/// Closed-form figures for octave z >= 0. Throws ConfigError for z < 0.
ErrorFigures error_figures(double c, int z);

/// A validated real-valued approximation: c in (2, 3].
class RealApprox {
 public:
  RealApprox(double c, bool mpe);

  double c() const { return c_; }
  bool mpe() const { return mpe_; }

  double operator()(double x) const { return mpe_ ? y_l_mpe_real(x, c_) : y_l_real(x, c_); }
  double rel_error(double x) const { return analytic::rel_error(x, c_, mpe_); }

 private:
  double c_;
  bool mpe_;
};

}  // namespace arecip::analytic
