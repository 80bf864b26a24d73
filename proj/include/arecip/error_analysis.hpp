#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "arecip/fixedpoint.hpp"

namespace arecip {

struct VariantSpec {
  CVariant c = CVariant::always_above();
  bool mpe = false;
};

struct RealSpace {};

/// Integer inputs through the bit-exact datapath of the given width.
struct FixedSpace {
  int width = kDefaultWidth;
  Version version = Version::V1;
};

struct SweepSpec {
  double x_min = 1.0;
  double x_max = 2.0;
  std::size_t samples = 2;
  std::vector<VariantSpec> variants;
  std::variant<RealSpace, FixedSpace> space = RealSpace{};

  /// Throws ConfigError when x_min < 1, x_max <= x_min, samples < 2 or no variants.
  void validate() const;
};

struct SweepRow {
  double x = 0.0;
  std::string variant;
  bool mpe = false;
  double y_approx = 0.0;
  double y_exact = 0.0;
  double rel_error = 0.0;
};

struct ErrorStats {
  double max_rel = 0.0;
  double min_rel = 0.0;
  double mean_rel = 0.0;
  double argmax_x = 0.0;
  double argmin_x = 0.0;
  std::size_t count = 0;
};

/// Stats over a set of rows. First occurrence wins ties for argmax/argmin.
ErrorStats compute_stats(std::span<const SweepRow> rows);

struct SweepResult {
  std::vector<SweepRow> rows;      // variant-major, x ascending within a variant
  std::vector<ErrorStats> stats;   // one entry per spec variant
};

/// Real space samples x_i = x_min + (i + 1/2) * step so that no sample sits on
/// an interval border. Fixed space visits the integers of [ceil(x_min), floor(x_max)]
/// with stride max(1, range / samples).
SweepResult sweep(const SweepSpec& spec);

struct VerifyReport {
  RecipConfig config;
  std::uint64_t inputs_checked = 0;
  std::uint64_t v1_v2_mismatches = 0;
  std::uint64_t lod_mismatches = 0;
  std::uint64_t gap_violations = 0;           // |Y/2^F - y_ref| >= 2^-F
  double max_quantization_gap = 0.0;          // in output units
  std::uint64_t monotonicity_violations = 0;  // count of X with Y(X+1) > Y(X)
  std::uint32_t first_violation_x = 0;        // 0 when monotone

  bool monotone() const { return monotonicity_violations == 0; }
  /// True when no datapath disagreement was found; monotonicity is reported, not judged.
  bool ok() const { return v1_v2_mismatches == 0 && lod_mismatches == 0 && gap_violations == 0; }
};

inline constexpr int kMaxExhaustiveWidth = 20;

/// Visit every X in [1, 2^B). The reference y_ref is the real model evaluated at
/// the quantized constant c_fixed / 2^F (with MPE when cfg.mpe).
VerifyReport verify_exhaustive(const RecipConfig& cfg);

/// Fixed notation with `digits` significant digits ("0.000123456789" style, never exponent).
std::string format_sig(double value, int digits = 9);

/// Header `x,variant,mpe,y_approx,y_exact,rel_error`, then one line per row in order.
/// Throws ConfigError on empty input and std::runtime_error when the stream fails.
void emit_csv(std::span<const SweepRow> rows, std::ostream& out);

}  // namespace arecip
