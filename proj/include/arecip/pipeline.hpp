#pragma once

// Behavioral register-transfer model of the reciprocal datapath.
//
// The datapath is split into segments; each segment ends in a register. A
// word presented at cycle k is visible at the output register at cycle k + L,
// L being the number of registers. One word is accepted per cycle.
//
//   NoRegs        [LOD | datapath | MPE]                           L = 1
//   V1Registered  [LOD] [scale X, subtract from C] [scale, shift] [MPE]   L = 3 (+1)
//   V2Registered  [LOD] [parallel products, adder, shift] [MPE]           L = 2 (+1)

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "arecip/fixedpoint.hpp"

namespace arecip {

enum class Registering { NoRegs, V1Registered, V2Registered };

Registering parse_registering(std::string_view text);  // "noregs" | "v1" | "v2"

struct PipelineVariant {
  Registering kind = Registering::NoRegs;
  bool mpe = false;
};

/// Cycles from input to output: 1, 3 + mpe, or 2 + mpe.
int latency(PipelineVariant variant);

/// Datapath signals carried through the stage registers.
struct Signals {
  std::uint32_t x = 0;
  std::uint32_t lod = 0;      // 2^z
  std::uint32_t inv_pow = 0;  // bit-reversed LOD, 2^-z in UQ1.(B-1)
  Wide acc = 0;               // V1: c_fixed - X * 2^(F-z)
  std::uint32_t y = 0;
  bool fault = false;  // zero input: no leading one
};

enum class SampleStatus { NotValid, Valid, Fault };

struct StreamSample {
  std::uint64_t cycle = 0;
  std::optional<std::uint32_t> x;  // nullopt: bubble
  SampleStatus status = SampleStatus::NotValid;
  std::uint32_t y = 0;  // meaningful when status == Valid
};

class PipelineSimulator {
 public:
  /// Throws ConfigError when variant.mpe and cfg.mpe disagree. Registered
  /// variants use their own datapath; NoRegs follows cfg.version.
  PipelineSimulator(PipelineVariant variant, const RecipConfig& cfg);

  /// One clock cycle: report the output register, then latch every stage.
  StreamSample step(std::optional<std::uint32_t> input);

  int latency() const { return static_cast<int>(registers_.size()); }
  std::uint64_t cycle() const { return cycle_; }

  /// Register contents; index 0 is the register after the first segment.
  std::span<const std::optional<Signals>> registers() const { return registers_; }

 private:
  using Block = void (*)(Signals&, const RecipConfig&);

  RecipConfig cfg_;
  std::vector<std::vector<Block>> segments_;
  std::vector<std::optional<Signals>> registers_;
  std::uint64_t cycle_ = 0;
};

/// Feed `inputs` one per cycle, then drain. Returns inputs.size() + latency samples.
std::vector<StreamSample> simulate_stream(std::span<const std::uint32_t> inputs, PipelineVariant variant,
                                          const RecipConfig& cfg);

/// CSV trace `cycle,x,y,status`; bubbles leave x empty, invalid outputs leave y empty.
void emit_trace_csv(std::span<const StreamSample> samples, std::ostream& out);

}  // namespace arecip
