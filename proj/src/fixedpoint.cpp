#include "arecip/fixedpoint.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <sstream>

#include "arecip/constants.hpp"

namespace arecip {

namespace {

std::uint32_t mask(int width) {
  return width == 32 ? 0xFFFF'FFFFu : ((1u << width) - 1u);
}

int bit_width_wide(Wide v) {
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  if (hi != 0) return 64 + std::bit_width(hi);
  return std::bit_width(static_cast<std::uint64_t>(v));
}

void require_one_hot(Word b, const char* who) {
  if (std::popcount(b.bits()) != 1) {
    throw PreconditionError(std::string(who) + ": multiplier operand must be a power of two");
  }
}

void require_nonzero(Word x, const char* who) {
  if (x.bits() == 0) throw DomainError(std::string(who) + ": operand 0 has no leading one");
}

void require_width(Word x, const RecipConfig& cfg) {
  if (x.width() != cfg.width) throw ConfigError("input word width does not match configuration");
}

}  // namespace

Word::Word(std::uint32_t bits, int width) : bits_(bits), width_(width) {
  check_width(width);
  if ((bits & ~mask(width)) != 0) throw ConfigError("word value does not fit in its width");
}

void check_width(int width) {
  if (width < kMinWidth || width > kMaxWidth) {
    throw ConfigError("bit width must lie in [" + std::to_string(kMinWidth) + ", " +
                      std::to_string(kMaxWidth) + "]");
  }
}

double fraction_value(Word y) { return std::ldexp(static_cast<double>(y.bits()), -(y.width() - 1)); }

CVariant CVariant::always_above() { return {CKind::AlwaysAbove, kCAlwaysAbove}; }
CVariant CVariant::always_below() { return {CKind::AlwaysBelow, kCAlwaysBelow}; }
CVariant CVariant::zero_mean() { return {CKind::ZeroMeanRelErr, kCZeroMean}; }

CVariant CVariant::custom(double c) {
  // Below 2 the subtraction can underflow; above 3 the segment endpoints no longer hold.
  if (!std::isfinite(c) || c <= 2.0 || c > 3.0) throw ConfigError("custom C must lie in (2, 3]");
  return {CKind::Custom, c};
}

CVariant CVariant::parse(std::string_view text) {
  if (text == "3") return always_above();
  if (text == "2sqrt2") return always_below();
  if (text == "26over9") return zero_mean();
  double c = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, c);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("unrecognised constant '" + std::string(text) +
                      "' (expected 3, 2sqrt2, 26over9 or a real in (2, 3])");
  }
  return custom(c);
}

std::uint64_t CVariant::quantize(int width) const {
  check_width(width);
  if (kind_ == CKind::AlwaysAbove) return std::uint64_t{3} << (width - 1);
  return static_cast<std::uint64_t>(std::floor(std::ldexp(real_, width - 1) + 0.5));
}

std::string CVariant::label() const {
  switch (kind_) {
    case CKind::AlwaysAbove: return "3";
    case CKind::AlwaysBelow: return "2sqrt2";
    case CKind::ZeroMeanRelErr: return "26over9";
    case CKind::Custom: break;
  }
  std::ostringstream os;
  os.precision(17);
  os << real_;
  return os.str();
}

void RecipConfig::validate() const {
  check_width(width);
  if (c.kind() == CKind::Custom) (void)CVariant::custom(c.value());
}

Word lod(Word x) {
  require_nonzero(x, "lod");
  return Word(std::bit_floor(x.bits()), x.width());
}

Word lod_gate_model(Word x) {
  require_nonzero(x, "lod_gate_model");
  // Walk from the MSB down; none_above is the AND of the inverted higher inputs.
  std::uint32_t out = 0;
  bool none_above = true;
  for (int i = x.width() - 1; i >= 0; --i) {
    const bool xi = x.bit(i);
    if (xi && none_above) out |= 1u << i;
    none_above = none_above && !xi;
  }
  return Word(out, x.width());
}

Word lod_negation_model(Word x) {
  require_nonzero(x, "lod_negation_model");
  const std::uint32_t r = bit_reverse(x).bits();
  const std::uint32_t twos = (~r + 1u) & mask(x.width());
  return bit_reverse(Word(r & twos, x.width()));
}

int octave(Word one_hot) {
  if (std::popcount(one_hot.bits()) != 1) throw PreconditionError("octave: operand must be one-hot");
  return std::countr_zero(one_hot.bits());
}

Word bit_reverse(Word x) {
  std::uint32_t out = 0;
  const int w = x.width();
  for (int i = 0; i < w; ++i) {
    if (x.bit(i)) out |= 1u << (w - 1 - i);
  }
  return Word(out, w);
}

Wide or_shifter_mul(Wide a, Word b) {
  require_one_hot(b, "or_shifter_mul");
  if (a != 0 && bit_width_wide(a) + b.width() - 1 > 128) {
    throw PreconditionError("or_shifter_mul: product exceeds 128 bits");
  }
  Wide layer = a;
  Wide out = 0;
  for (int i = 0; i < b.width(); ++i) {
    if (b.bit(i)) out |= layer;
    layer <<= 1;
  }
  return out;
}

Wide or_shifter_mul_sq(Wide a, Word b) {
  require_one_hot(b, "or_shifter_mul_sq");
  if (a != 0 && bit_width_wide(a) + 2 * (b.width() - 1) > 128) {
    throw PreconditionError("or_shifter_mul_sq: product exceeds 128 bits");
  }
  Wide layer = a;
  Wide out = 0;
  for (int i = 0; i < b.width(); ++i) {
    if (b.bit(i)) out |= layer;
    layer <<= 2;
  }
  return out;
}

Word recip_approx_v1(Word x, const RecipConfig& cfg) {
  require_width(x, cfg);
  require_nonzero(x, "recip_approx_v1");
  const int f = cfg.frac_bits();
  const Word inv_pow = bit_reverse(lod(x));  // 2^(F-z), i.e. 2^-z in UQ1.F

  // X * 2^-z lands in [1, 2) at F fractional bits; C - that stays positive for C > 2.
  const Wide scaled = or_shifter_mul(x.bits(), inv_pow);
  const Wide acc = static_cast<Wide>(cfg.c_fixed()) - scaled;

  // acc * 2^-(z+1): multiply by 2^(F-z), then the constant shift by F+1.
  const Wide y = or_shifter_mul(acc, inv_pow) >> (f + 1);
  return Word(static_cast<std::uint32_t>(y), cfg.width);
}

Word recip_approx_v2(Word x, const RecipConfig& cfg) {
  require_width(x, cfg);
  require_nonzero(x, "recip_approx_v2");
  const int f = cfg.frac_bits();
  const int internal_frac = f + 2 * cfg.width;
  const Word inv_pow = bit_reverse(lod(x));

  // Both products carry 2F+1 fractional bits: c_fixed * 2^(F-z) is C * 2^-(z+1),
  // X * 2^(2F-2z) is X * 2^-(2z+1). Align to the internal precision before the adder.
  const int align = internal_frac - (2 * f + 1);
  const Wide head = or_shifter_mul(cfg.c_fixed(), inv_pow) << align;
  const Wide tail = or_shifter_mul_sq(x.bits(), inv_pow) << align;
  const Wide y = (head - tail) >> (internal_frac - f);
  return Word(static_cast<std::uint32_t>(y), cfg.width);
}

Word mpe_clip(Word y, int z, const RecipConfig& cfg) {
  const int f = cfg.frac_bits();
  const std::uint32_t threshold = (f - (z + 1) >= 0) ? (1u << (f - (z + 1))) : 0u;
  return y.bits() >= threshold ? y : Word(threshold, y.width());
}

Word recip_approx(Word x, const RecipConfig& cfg) {
  const Word y = cfg.version == Version::V1 ? recip_approx_v1(x, cfg) : recip_approx_v2(x, cfg);
  if (!cfg.mpe) return y;
  return mpe_clip(y, octave(lod(x)), cfg);
}

Word coarse_recip(Word x) {
  const Word msb = lod(x);
  const int z = octave(msb);
  const int f = x.width() - 1;
  if (msb == x) return Word(1u << (f - z), x.width());
  return Word(f - z - 1 >= 0 ? (1u << (f - z - 1)) : 0u, x.width());
}

}  // namespace arecip
