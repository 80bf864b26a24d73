#include "arecip/pipeline.hpp"

#include <ostream>
#include <stdexcept>
#include <string>

namespace arecip {

namespace {

void detect_leading_one(Signals& s, const RecipConfig& cfg) {
  if (s.x == 0) {
    s.fault = true;
    return;
  }
  const Word msb = lod(cfg.word(s.x));
  s.lod = msb.bits();
  s.inv_pow = bit_reverse(msb).bits();
}

void v1_subtract(Signals& s, const RecipConfig& cfg) {
  if (s.fault) return;
  s.acc = static_cast<Wide>(cfg.c_fixed()) - or_shifter_mul(s.x, cfg.word(s.inv_pow));
}

void v1_scale_output(Signals& s, const RecipConfig& cfg) {
  if (s.fault) return;
  s.y = static_cast<std::uint32_t>(or_shifter_mul(s.acc, cfg.word(s.inv_pow)) >> (cfg.frac_bits() + 1));
}

void v2_products(Signals& s, const RecipConfig& cfg) {
  if (s.fault) return;
  const int f = cfg.frac_bits();
  const int internal_frac = f + 2 * cfg.width;
  const int align = internal_frac - (2 * f + 1);
  const Word inv_pow = cfg.word(s.inv_pow);
  const Wide head = or_shifter_mul(cfg.c_fixed(), inv_pow) << align;
  const Wide tail = or_shifter_mul_sq(s.x, inv_pow) << align;
  s.y = static_cast<std::uint32_t>((head - tail) >> (internal_frac - f));
}

void mpe_select(Signals& s, const RecipConfig&) {
  if (s.fault) return;
  const std::uint32_t threshold = s.inv_pow >> 1;  // 2^-(z+1)
  if (s.y < threshold) s.y = threshold;
}

}  // namespace

Registering parse_registering(std::string_view text) {
  if (text == "noregs") return Registering::NoRegs;
  if (text == "v1") return Registering::V1Registered;
  if (text == "v2") return Registering::V2Registered;
  throw ConfigError("unknown pipeline variant '" + std::string(text) + "' (expected noregs, v1 or v2)");
}

int latency(PipelineVariant variant) {
  switch (variant.kind) {
    case Registering::NoRegs: return 1;
    case Registering::V1Registered: return 3 + (variant.mpe ? 1 : 0);
    case Registering::V2Registered: return 2 + (variant.mpe ? 1 : 0);
  }
  return 1;
}

PipelineSimulator::PipelineSimulator(PipelineVariant variant, const RecipConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  if (variant.mpe != cfg.mpe) throw ConfigError("pipeline variant and configuration disagree on MPE");

  switch (variant.kind) {
    case Registering::NoRegs: {
      std::vector<Block> all{detect_leading_one};
      if (cfg.version == Version::V1) {
        all.push_back(v1_subtract);
        all.push_back(v1_scale_output);
      } else {
        all.push_back(v2_products);
      }
      if (variant.mpe) all.push_back(mpe_select);
      segments_.push_back(std::move(all));
      break;
    }
    case Registering::V1Registered:
      segments_ = {{detect_leading_one}, {v1_subtract}, {v1_scale_output}};
      if (variant.mpe) segments_.push_back({mpe_select});
      break;
    case Registering::V2Registered:
      segments_ = {{detect_leading_one}, {v2_products}};
      if (variant.mpe) segments_.push_back({mpe_select});
      break;
  }
  registers_.resize(segments_.size());
}

StreamSample PipelineSimulator::step(std::optional<std::uint32_t> input) {
  StreamSample sample;
  sample.cycle = cycle_;
  sample.x = input;
  if (const auto& out = registers_.back()) {
    sample.status = out->fault ? SampleStatus::Fault : SampleStatus::Valid;
    sample.y = out->fault ? 0 : out->y;
  }

  // Clock edge: walk back to front so each segment reads last cycle's register.
  for (std::size_t i = segments_.size(); i-- > 0;) {
    std::optional<Signals> next;
    if (i == 0) {
      if (input) {
        (void)cfg_.word(*input);  // range check
        next = Signals{.x = *input};
      }
    } else {
      next = registers_[i - 1];
    }
    if (next) {
      for (Block block : segments_[i]) block(*next, cfg_);
    }
    registers_[i] = next;
  }
  ++cycle_;
  return sample;
}

std::vector<StreamSample> simulate_stream(std::span<const std::uint32_t> inputs, PipelineVariant variant,
                                          const RecipConfig& cfg) {
  PipelineSimulator sim(variant, cfg);
  std::vector<StreamSample> trace;
  trace.reserve(inputs.size() + static_cast<std::size_t>(sim.latency()));
  for (std::uint32_t x : inputs) trace.push_back(sim.step(x));
  for (int i = 0; i < sim.latency(); ++i) trace.push_back(sim.step(std::nullopt));
  return trace;
}

void emit_trace_csv(std::span<const StreamSample> samples, std::ostream& out) {
  out << "cycle,x,y,status\n";
  for (const auto& s : samples) {
    out << s.cycle << ',';
    if (s.x) out << *s.x;
    out << ',';
    if (s.status == SampleStatus::Valid) out << s.y;
    out << ',';
    switch (s.status) {
      case SampleStatus::NotValid: out << "invalid"; break;
      case SampleStatus::Valid: out << "valid"; break;
      case SampleStatus::Fault: out << "fault"; break;
    }
    out << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("emit_trace_csv: write to sink failed");
}

}  // namespace arecip
