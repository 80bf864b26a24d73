#pragma once

// Bit-exact integer model of the approximate reciprocal datapath.
//
// Input words are unsigned integers of width B. Outputs are UQ1.(B-1) words:
// F = B-1 fractional bits, so a raw output Y represents Y / 2^F in [0, 2).
// For 2^z <= X < 2^(z+1) the datapath evaluates
//
//     y = (C - X * 2^-z) * 2^-(z+1)
//
// using a leading-one detector, a bit-reversal, two power-of-two multipliers
// and a subtraction from the constant C.

#include <cstdint>
#include <string>
#include <string_view>

#include "arecip/errors.hpp"

namespace arecip {

__extension__ typedef unsigned __int128 Wide;

inline constexpr int kMinWidth = 4;
inline constexpr int kMaxWidth = 32;
inline constexpr int kDefaultWidth = 16;

/// Raw unsigned bit-vector of width B in [4, 32]; bits < 2^B is enforced.
class Word {
 public:
  Word(std::uint32_t bits, int width);

  std::uint32_t bits() const { return bits_; }
  int width() const { return width_; }
  bool bit(int i) const { return ((bits_ >> i) & 1u) != 0; }

  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::uint32_t bits_;
  int width_;
};

void check_width(int width);

/// Value of a UQ1.(B-1) output word.
double fraction_value(Word y);

enum class CKind { AlwaysAbove, AlwaysBelow, ZeroMeanRelErr, Custom };

/// The subtraction constant C. C = 3 keeps the approximation above 1/x,
/// C = 2*sqrt(2) keeps it below, C = 26/9 gives zero mean relative error.
class CVariant {
 public:
  static CVariant always_above();
  static CVariant always_below();
  static CVariant zero_mean();
  /// Throws ConfigError unless c is in (2, 3].
  static CVariant custom(double c);
  /// Accepts "3", "2sqrt2", "26over9" or a real number in (2, 3].
  static CVariant parse(std::string_view text);

  CKind kind() const { return kind_; }
  double value() const { return real_; }

  /// round_half_up(C * 2^(width-1)); at most 3 * 2^(width-1).
  std::uint64_t quantize(int width) const;

  std::string label() const;

  friend bool operator==(const CVariant&, const CVariant&) = default;

 private:
  CVariant(CKind kind, double real) : kind_(kind), real_(real) {}

  CKind kind_;
  double real_;
};

enum class Version { V1, V2 };

/// Everything that determines the bit-exact output for an input word.
struct RecipConfig {
  int width = kDefaultWidth;
  CVariant c = CVariant::always_above();
  bool mpe = false;
  Version version = Version::V1;

  int frac_bits() const { return width - 1; }
  std::uint64_t c_fixed() const { return c.quantize(width); }
  Word word(std::uint32_t bits) const { return Word(bits, width); }
  void validate() const;
};

// --- leading-one detection ------------------------------------------------

/// 2^floor(log2 x): clears every bit below the leading one. Throws DomainError on 0.
Word lod(Word x);

/// AND-gate network: out_i = x_i & ~x_(i+1) & ... & ~x_(B-1).
Word lod_gate_model(Word x);

/// reverse(reverse(x) & -reverse(x)): isolate-lowest-set-bit on the mirrored word.
Word lod_negation_model(Word x);

/// Octave index z = floor(log2 x) read off a one-hot LOD output.
int octave(Word one_hot);

/// Mirror bit i to bit B-1-i. Maps 2^z onto the UQ1.(B-1) image of 2^-z.
Word bit_reverse(Word x);

// --- power-of-two multipliers ----------------------------------------------

/// a * b for one-hot b, built from shift layers joined by OR gates.
/// Throws PreconditionError when b is not one-hot or the product would not fit.
Wide or_shifter_mul(Wide a, Word b);

/// a * b^2 for one-hot b; every layer shifts by two.
Wide or_shifter_mul_sq(Wide a, Word b);

// --- reciprocal datapaths --------------------------------------------------

/// Serial datapath: Y = (c_fixed - X * 2^(F-z)) >> (z+1).
Word recip_approx_v1(Word x, const RecipConfig& cfg);

/// Bracket-expanded datapath: C * 2^-(z+1) - X * 2^-(2z+1), both products
/// formed in parallel at F + 2B fractional bits and floored once.
Word recip_approx_v2(Word x, const RecipConfig& cfg);

/// Monotonicity-preserving clip: max(Y, 2^-(z+1)). No clipping when z = F.
Word mpe_clip(Word y, int z, const RecipConfig& cfg);

/// Dispatch on cfg.version, then apply the MPE clip when cfg.mpe is set.
Word recip_approx(Word x, const RecipConfig& cfg);

/// 2^-ceil(log2 X) in UQ1.(B-1); 0 when the value underflows the format.
Word coarse_recip(Word x);

}  // namespace arecip
