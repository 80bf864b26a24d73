#include "arecip/error_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "arecip/analytic.hpp"

namespace arecip {

void SweepSpec::validate() const {
  if (!std::isfinite(x_min) || !std::isfinite(x_max)) throw ConfigError("sweep bounds must be finite");
  if (x_min < 1.0) throw ConfigError("sweep x_min must be >= 1");
  if (!(x_max > x_min)) throw ConfigError("sweep x_max must exceed x_min");
  if (samples < 2) throw ConfigError("sweep needs at least 2 samples");
  if (variants.empty()) throw ConfigError("sweep needs at least one variant");
  if (const auto* fixed = std::get_if<FixedSpace>(&space)) {
    check_width(fixed->width);
    if (x_max >= std::ldexp(1.0, fixed->width)) throw ConfigError("sweep x_max exceeds the input word range");
    if (std::ceil(x_min) > std::floor(x_max)) throw ConfigError("sweep range holds no integer input");
  }
  for (const auto& v : variants) {
    if (v.c.kind() == CKind::Custom) (void)CVariant::custom(v.c.value());
  }
}

ErrorStats compute_stats(std::span<const SweepRow> rows) {
  ErrorStats s;
  if (rows.empty()) return s;
  s.max_rel = s.min_rel = rows.front().rel_error;
  s.argmax_x = s.argmin_x = rows.front().x;
  double sum = 0.0;
  for (const auto& r : rows) {
    if (r.rel_error > s.max_rel) {
      s.max_rel = r.rel_error;
      s.argmax_x = r.x;
    }
    if (r.rel_error < s.min_rel) {
      s.min_rel = r.rel_error;
      s.argmin_x = r.x;
    }
    sum += r.rel_error;
  }
  s.count = rows.size();
  s.mean_rel = sum / static_cast<double>(s.count);
  return s;
}

namespace {

std::vector<double> real_grid(const SweepSpec& spec) {
  std::vector<double> xs(spec.samples);
  const double step = (spec.x_max - spec.x_min) / static_cast<double>(spec.samples);
  for (std::size_t i = 0; i < spec.samples; ++i) {
    xs[i] = spec.x_min + (static_cast<double>(i) + 0.5) * step;
  }
  return xs;
}

std::vector<std::uint32_t> integer_grid(const SweepSpec& spec) {
  const auto lo = static_cast<std::uint64_t>(std::ceil(spec.x_min));
  const auto hi = static_cast<std::uint64_t>(std::floor(spec.x_max));
  const std::uint64_t stride = std::max<std::uint64_t>(1, (hi - lo + 1) / spec.samples);
  std::vector<std::uint32_t> xs;
  for (std::uint64_t x = lo; x <= hi; x += stride) xs.push_back(static_cast<std::uint32_t>(x));
  return xs;
}

}  // namespace

SweepResult sweep(const SweepSpec& spec) {
  spec.validate();
  SweepResult result;
  for (const auto& variant : spec.variants) {
    const std::size_t first = result.rows.size();
    if (const auto* fixed = std::get_if<FixedSpace>(&spec.space)) {
      const RecipConfig cfg{fixed->width, variant.c, variant.mpe, fixed->version};
      for (std::uint32_t x : integer_grid(spec)) {
        const double y = fraction_value(recip_approx(cfg.word(x), cfg));
        const double xd = static_cast<double>(x);
        result.rows.push_back({xd, variant.c.label(), variant.mpe, y, 1.0 / xd, xd * y - 1.0});
      }
    } else {
      const analytic::RealApprox model(variant.c.value(), variant.mpe);
      for (double x : real_grid(spec)) {
        const double y = model(x);
        result.rows.push_back({x, variant.c.label(), variant.mpe, y, 1.0 / x, x * y - 1.0});
      }
    }
    result.stats.push_back(compute_stats(std::span(result.rows).subspan(first)));
  }
  return result;
}

VerifyReport verify_exhaustive(const RecipConfig& cfg) {
  cfg.validate();
  if (cfg.width > kMaxExhaustiveWidth) {
    throw ConfigError("exhaustive verification is limited to widths <= " +
                      std::to_string(kMaxExhaustiveWidth));
  }
  VerifyReport report;
  report.config = cfg;

  const int f = cfg.frac_bits();
  const double ulp = std::ldexp(1.0, -f);
  const double c_quant = std::ldexp(static_cast<double>(cfg.c_fixed()), -f);
  RecipConfig v1 = cfg;
  v1.version = Version::V1;
  RecipConfig v2 = cfg;
  v2.version = Version::V2;

  const std::uint32_t end = 1u << cfg.width;
  std::uint32_t prev = 0;
  for (std::uint32_t x = 1; x < end; ++x) {
    const Word in = cfg.word(x);
    const Word ref_lod = lod(in);
    if (lod_gate_model(in) != ref_lod || lod_negation_model(in) != ref_lod) ++report.lod_mismatches;

    const Word y1 = recip_approx(in, v1);
    const Word y2 = recip_approx(in, v2);
    if (y1 != y2) ++report.v1_v2_mismatches;

    const Word y = cfg.version == Version::V1 ? y1 : y2;
    const double xd = static_cast<double>(x);
    const double y_ref = cfg.mpe ? analytic::y_l_mpe_real(xd, c_quant) : analytic::y_l_real(xd, c_quant);
    const double gap = std::fabs(fraction_value(y) - y_ref);
    report.max_quantization_gap = std::max(report.max_quantization_gap, gap);
    if (!(gap < ulp)) ++report.gap_violations;

    if (x > 1 && y.bits() > prev) {
      if (report.monotonicity_violations == 0) report.first_violation_x = x - 1;
      ++report.monotonicity_violations;
    }
    prev = y.bits();
    ++report.inputs_checked;
  }
  return report;
}

std::string format_sig(double value, int digits) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  if (value == 0.0) return "0." + std::string(static_cast<std::size_t>(std::max(1, digits - 1)), '0');
  const int exponent = static_cast<int>(std::floor(std::log10(std::fabs(value))));
  const int decimals = std::max(0, digits - 1 - exponent);
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

void emit_csv(std::span<const SweepRow> rows, std::ostream& out) {
  if (rows.empty()) throw ConfigError("emit_csv: no rows to write");
  out << "x,variant,mpe,y_approx,y_exact,rel_error\n";
  for (const auto& r : rows) {
    out << format_sig(r.x) << ',' << r.variant << ',' << (r.mpe ? 1 : 0) << ',' << format_sig(r.y_approx)
        << ',' << format_sig(r.y_exact) << ',' << format_sig(r.rel_error) << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("emit_csv: write to sink failed");
}

}  // namespace arecip
