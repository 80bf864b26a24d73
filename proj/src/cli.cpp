#include "arecip/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>

#include "arecip/analytic.hpp"
#include "arecip/applications.hpp"
#include "arecip/error_analysis.hpp"
#include "arecip/pipeline.hpp"

namespace arecip::cli {

namespace {

using nlohmann::ordered_json;

/// Raised for flag values that parse but make no sense; maps to exit code 2.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

Version parse_version(const std::string& text) {
  if (text == "v1") return Version::V1;
  if (text == "v2") return Version::V2;
  throw UsageError("unknown datapath version '" + text + "' (expected v1 or v2)");
}

struct RecipFlags {
  std::string kind = "approx";
  std::string c;
  bool mpe = false;
  bool fixed = false;
  int bits = kDefaultWidth;
};

void add_recip_flags(CLI::App* cmd, RecipFlags& f, const std::string& default_c) {
  f.c = default_c;
  cmd->add_option("--recip", f.kind, "Reciprocal: exact, approx or coarse")
      ->check(CLI::IsMember({"exact", "approx", "coarse"}))
      ->capture_default_str();
  cmd->add_option("--c", f.c, "Constant C: 3, 2sqrt2, 26over9 or a real in (2, 3]")->capture_default_str();
  cmd->add_flag("--mpe", f.mpe, "Enable the monotonicity-preserving extension");
  cmd->add_flag("--fixed", f.fixed, "Use the bit-exact fixed-point datapath instead of the real model");
  cmd->add_option("--bits", f.bits, "Word width for --fixed")->capture_default_str();
}

Reciprocal make_recip(const RecipFlags& f) {
  if (f.kind != "approx" && (f.mpe || f.fixed)) throw UsageError("--mpe and --fixed require --recip approx");
  if (f.kind == "exact") return Reciprocal::exact();
  if (f.kind == "coarse") return Reciprocal::coarse();
  const CVariant c = CVariant::parse(f.c);
  if (f.fixed) return Reciprocal::approx_fixed(RecipConfig{f.bits, c, f.mpe, Version::V1});
  return Reciprocal::approx(analytic::RealApprox(c.value(), f.mpe));
}

/// --out target or the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
    if (!*file_) throw std::runtime_error("cannot open output file '" + path + "'");
    stream_ = file_.get();
  }
  std::ostream& get() { return *stream_; }
  void finish() {
    stream_->flush();
    if (!*stream_) throw std::runtime_error("write to output failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

void write_json(Sink& sink, const ordered_json& doc) {
  sink.get() << doc.dump(2) << '\n';
  sink.finish();
}

std::vector<std::uint32_t> load_inputs(const std::string& spec, int bits, std::uint64_t seed) {
  check_width(bits);
  std::vector<std::uint32_t> values;
  constexpr std::string_view kRandom = "random:";
  if (spec.starts_with(kRandom)) {
    std::size_t count = 0;
    try {
      count = std::stoull(spec.substr(kRandom.size()));
    } catch (const std::exception&) {
      throw UsageError("--inputs random:N needs a count");
    }
    std::mt19937_64 rng(seed);
    const std::uint64_t top = (std::uint64_t{1} << bits) - 1;
    std::uniform_int_distribution<std::uint64_t> dist(1, top);
    values.reserve(count);
    for (std::size_t i = 0; i < count; ++i) values.push_back(static_cast<std::uint32_t>(dist(rng)));
    return values;
  }
  std::ifstream in(spec);
  if (!in) throw std::runtime_error("cannot read input file '" + spec + "'");
  std::uint64_t v = 0;
  while (in >> v) {
    if (v >> bits) throw std::runtime_error("input value " + std::to_string(v) + " does not fit in the word");
    values.push_back(static_cast<std::uint32_t>(v));
  }
  if (!in.eof()) throw std::runtime_error("malformed input file '" + spec + "'");
  return values;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Approximate reciprocal: error analysis, verification, pipeline simulation, benchmarks", "arecip"};
  app.require_subcommand(1);

  std::string out_path;
  std::uint64_t seed = 0;
  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_path, "Write results to this file instead of stdout");
    cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
  };

  // analyze
  std::string analyze_c;
  int analyze_z = 0;
  auto* analyze = app.add_subcommand("analyze", "Closed-form error figures for a constant C (JSON)");
  analyze->add_option("--c", analyze_c, "Constant C: 3, 2sqrt2, 26over9 or a real in (2, 3]")->required();
  analyze->add_option("--z", analyze_z, "Octave index used for the position figures")->capture_default_str();
  common(analyze);

  // sweep
  std::vector<std::string> sweep_c;
  bool sweep_mpe = false, sweep_fixed = false;
  double sweep_xmin = 2.0, sweep_xmax = 80.0;
  std::size_t sweep_samples = 10000;
  int sweep_bits = kDefaultWidth;
  std::string sweep_version = "v1";
  auto* sweep_cmd = app.add_subcommand("sweep", "Relative error over a range of x (CSV)");
  sweep_cmd->add_option("--c", sweep_c, "Constant C (repeatable)")->required();
  sweep_cmd->add_flag("--mpe", sweep_mpe, "Enable the monotonicity-preserving extension");
  sweep_cmd->add_option("--xmin", sweep_xmin)->capture_default_str();
  sweep_cmd->add_option("--xmax", sweep_xmax)->capture_default_str();
  sweep_cmd->add_option("--samples", sweep_samples)->capture_default_str();
  sweep_cmd->add_flag("--fixed", sweep_fixed, "Sweep integer inputs through the fixed-point datapath");
  sweep_cmd->add_option("--bits", sweep_bits, "Word width for --fixed")->capture_default_str();
  sweep_cmd->add_option("--version", sweep_version, "Datapath for --fixed: v1 or v2")->capture_default_str();
  common(sweep_cmd);

  // verify
  int verify_bits = kDefaultWidth;
  std::string verify_c = "3", verify_version = "v1";
  bool verify_mpe = false;
  auto* verify = app.add_subcommand("verify", "Exhaustive fixed-point verification (JSON); exit 1 on mismatch");
  verify->add_option("--bits", verify_bits)->capture_default_str();
  verify->add_option("--c", verify_c)->capture_default_str();
  verify->add_flag("--mpe", verify_mpe);
  verify->add_option("--version", verify_version, "Datapath judged for gap and monotonicity")->capture_default_str();
  common(verify);

  // pipeline
  std::string pipe_variant, pipe_inputs, pipe_c = "3", pipe_version = "v2";
  bool pipe_mpe = false;
  int pipe_bits = kDefaultWidth;
  auto* pipeline = app.add_subcommand("pipeline", "Cycle-by-cycle register-transfer trace (CSV)");
  pipeline->add_option("--variant", pipe_variant, "noregs, v1 or v2")
      ->required()
      ->check(CLI::IsMember({"noregs", "v1", "v2"}));
  pipeline->add_option("--inputs", pipe_inputs, "File of integers or random:N")->required();
  pipeline->add_flag("--mpe", pipe_mpe);
  pipeline->add_option("--bits", pipe_bits)->capture_default_str();
  pipeline->add_option("--c", pipe_c)->capture_default_str();
  pipeline->add_option("--version", pipe_version, "Datapath for noregs: v1 or v2")->capture_default_str();
  common(pipeline);

  // kmeans
  KMeansConfig km;
  RecipFlags km_recip;
  auto* kmeans = app.add_subcommand("kmeans", "k-means SSD with an approximate reciprocal (JSON)");
  kmeans->add_option("--k", km.clusters, "Number of clusters")->capture_default_str();
  kmeans->add_option("--trials", km.trials)->capture_default_str();
  kmeans->add_option("--points", km.points_per_cluster, "Points per cluster")->capture_default_str();
  kmeans->add_option("--max-iters", km.max_iters)->capture_default_str();
  add_recip_flags(kmeans, km_recip, "26over9");
  common(kmeans);

  // slms
  SparseLmsConfig lms;
  RecipFlags lms_recip;
  bool lms_summary = false;
  auto* slms = app.add_subcommand("slms", "Sparse LMS error trajectory (CSV, or JSON with --summary)");
  slms->add_option("--trials", lms.trials)->capture_default_str();
  slms->add_option("--iters", lms.iterations)->capture_default_str();
  slms->add_option("--taps", lms.filter_length)->capture_default_str();
  slms->add_option("--nonzeros", lms.nonzeros)->capture_default_str();
  slms->add_option("--lambda", lms.shrink_threshold, "Soft-threshold level")->capture_default_str();
  slms->add_option("--noise", lms.noise_stddev, "Measurement noise standard deviation")->capture_default_str();
  slms->add_flag("--summary", lms_summary, "Emit a JSON summary instead of the trajectory");
  add_recip_flags(slms, lms_recip, "2sqrt2");
  common(slms);

  // sigmoid
  RecipFlags sig_recip;
  double sig_xmin = -8.0, sig_xmax = 8.0;
  std::size_t sig_samples = 1000;
  auto* sig = app.add_subcommand("sigmoid", "Sigmoid through an approximate reciprocal (CSV)");
  sig->add_option("--xmin", sig_xmin)->capture_default_str();
  sig->add_option("--xmax", sig_xmax)->capture_default_str();
  sig->add_option("--samples", sig_samples)->capture_default_str();
  add_recip_flags(sig, sig_recip, "26over9");
  common(sig);

  std::vector<const char*> argv{"arecip"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*analyze) {
      const CVariant c = CVariant::parse(analyze_c);
      const auto f = analytic::error_figures(c.value(), analyze_z);
      Sink sink(out_path, out);
      write_json(sink, ordered_json{{"c", c.value()},
                                    {"c_label", c.label()},
                                    {"z", f.z},
                                    {"r_avg", f.r_avg},
                                    {"r_max_pos", f.r_max_pos},
                                    {"r_border", f.r_border},
                                    {"r_clip", f.r_clip},
                                    {"x_clip", f.x_clip},
                                    {"x_star", f.x_star},
                                    {"e_max_abs", f.e_max_abs},
                                    {"x_argmax_rel", f.x_argmax_rel}});
    } else if (*sweep_cmd) {
      SweepSpec spec;
      spec.x_min = sweep_xmin;
      spec.x_max = sweep_xmax;
      spec.samples = sweep_samples;
      for (const auto& c : sweep_c) spec.variants.push_back({CVariant::parse(c), sweep_mpe});
      if (sweep_fixed) spec.space = FixedSpace{sweep_bits, parse_version(sweep_version)};
      spec.validate();
      const SweepResult result = sweep(spec);
      Sink sink(out_path, out);
      emit_csv(result.rows, sink.get());
      sink.finish();
    } else if (*verify) {
      const RecipConfig cfg{verify_bits, CVariant::parse(verify_c), verify_mpe, parse_version(verify_version)};
      cfg.validate();
      if (cfg.width > kMaxExhaustiveWidth) throw UsageError("verify supports --bits up to 20");
      const VerifyReport r = verify_exhaustive(cfg);
      Sink sink(out_path, out);
      write_json(sink, ordered_json{{"bits", cfg.width},
                                    {"c", cfg.c.label()},
                                    {"c_fixed", cfg.c_fixed()},
                                    {"mpe", cfg.mpe},
                                    {"inputs_checked", r.inputs_checked},
                                    {"v1_v2_mismatches", r.v1_v2_mismatches},
                                    {"lod_mismatches", r.lod_mismatches},
                                    {"gap_violations", r.gap_violations},
                                    {"max_quantization_gap", r.max_quantization_gap},
                                    {"monotonicity_violations", r.monotonicity_violations},
                                    {"first_violation_x", r.first_violation_x},
                                    {"monotone", r.monotone()},
                                    {"ok", r.ok()}});
      if (!r.ok()) {
        err << "verify: datapath mismatches found\n";
        return kExitFailure;
      }
    } else if (*pipeline) {
      const RecipConfig cfg{pipe_bits, CVariant::parse(pipe_c), pipe_mpe, parse_version(pipe_version)};
      cfg.validate();
      const PipelineVariant variant{parse_registering(pipe_variant), pipe_mpe};
      const auto inputs = load_inputs(pipe_inputs, pipe_bits, seed);
      const auto trace = simulate_stream(inputs, variant, cfg);
      Sink sink(out_path, out);
      emit_trace_csv(trace, sink.get());
      sink.finish();
    } else if (*kmeans) {
      km.seed = seed;
      km.validate();
      const Reciprocal recip = make_recip(km_recip);
      const KMeansResult r = kmeans_run(km, recip);
      Sink sink(out_path, out);
      write_json(sink, ordered_json{{"k", km.clusters},
                                    {"trials", km.trials},
                                    {"seed", km.seed},
                                    {"recip", recip.name()},
                                    {"ssd_exact_mean", r.ssd_exact_mean},
                                    {"ssd_approx_mean", r.ssd_approx_mean},
                                    {"r_ssd_mean", r.r_ssd_mean}});
    } else if (*slms) {
      lms.seed = seed;
      lms.validate();
      const Reciprocal recip = make_recip(lms_recip);
      const LmsResult r = sparse_lms_run(lms, recip);
      Sink sink(out_path, out);
      if (lms_summary) {
        write_json(sink, ordered_json{{"trials", lms.trials},
                                      {"iterations", lms.iterations},
                                      {"seed", lms.seed},
                                      {"recip", recip.name()},
                                      {"final_error_norm", r.final_error()}});
      } else {
        sink.get() << "iteration,mean_sq_error\n";
        for (std::size_t k = 0; k < r.mean_sq_error.size(); ++k) {
          sink.get() << (k + 1) << ',' << format_sig(r.mean_sq_error[k]) << '\n';
        }
        sink.finish();
      }
    } else if (*sig) {
      if (sig_samples < 2 || !(sig_xmax > sig_xmin)) throw UsageError("sigmoid needs --samples >= 2 and xmax > xmin");
      const Reciprocal recip = make_recip(sig_recip);
      const Reciprocal exact = Reciprocal::exact();
      Sink sink(out_path, out);
      sink.get() << "x,exact,approx,rel_error\n";
      const double step = (sig_xmax - sig_xmin) / static_cast<double>(sig_samples - 1);
      for (std::size_t i = 0; i < sig_samples; ++i) {
        const double x = sig_xmin + static_cast<double>(i) * step;
        const double e = sigmoid(x, exact);
        const double a = sigmoid(x, recip);
        sink.get() << format_sig(x) << ',' << format_sig(e) << ',' << format_sig(a) << ','
                   << format_sig(a / e - 1.0) << '\n';
      }
      sink.finish();
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\nRun with --help for more information.\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\nRun with --help for more information.\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace arecip::cli
