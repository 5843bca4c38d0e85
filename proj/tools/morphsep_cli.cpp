// morphsep: separation, voice detection, kernel training and scoring from
// the command line.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "morphsep/formats.hpp"
#include "morphsep/pipeline.hpp"
#include "morphsep/resample.hpp"
#include "morphsep/synth.hpp"
#include "morphsep/wav.hpp"

namespace fs = std::filesystem;
using namespace morphsep;

namespace {

constexpr const char* kOutDirEnv = "MORPHSEP_OUT_DIR";

fs::path default_out_dir() {
  const char* env = std::getenv(kOutDirEnv);
  return env && *env ? fs::path(env) : fs::path(".");
}

std::mutex log_mutex;

void note(const std::string& line) {
  std::lock_guard lock(log_mutex);
  std::cerr << line << '\n';
}

// Role-tagged reference given as ROLE=PATH.
Reference parse_reference(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos) throw Error("reference '" + arg + "' is not ROLE=PATH");
  return {role_from_string(arg.substr(0, eq)), load_wav(arg.substr(eq + 1))};
}

AudioSignal load_at(const fs::path& path, double rate) {
  AudioSignal x = load_wav(path);
  return rate > 0 && x.sample_rate != rate ? resample(x, rate) : x;
}

// Runs job(i) for every i in [0, n) on up to `jobs` threads. The first
// failure is rethrown after all threads finish.
template <class Job>
void run_parallel(std::size_t n, unsigned jobs, Job job) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

const std::map<std::string, Method> kMethods{
    {"oracle", Method::oracle},       {"tv", Method::tv},
    {"rpca", Method::rpca},           {"kam-hpss", Method::kam_hpss},
    {"kam-repet", Method::kam_repet}, {"kam-cust", Method::kam_cust},
};

// Flags shared by `separate` and `detect`.
struct SeparationFlags {
  std::string method = "kam-repet";
  double alpha = 2.0;
  int iters = 0;  // 0 keeps the method's default
  std::vector<std::string> kernels;
  std::vector<std::string> refs;
  bool hpss = false;
  bool f0_filter = false;
  std::string tv_update = "stationary";
  double lambda_scale = 1.0;
  int period = 0;
  double rate = 22050.0;
  std::string manifest;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

  void add_to(CLI::App& cmd) {
    cmd.add_option("--method", method, "Separation method")
        ->transform(CLI::IsMember(kMethods))
        ->capture_default_str();
    cmd.add_option("--alpha", alpha, "Wiener exponent")->check(CLI::PositiveNumber)->capture_default_str();
    cmd.add_option("--iters", iters, "Iteration count (method default when 0)")->check(CLI::NonNegativeNumber);
    cmd.add_option("--kernels", kernels, "Kernel files for kam-cust")->check(CLI::ExistingFile);
    cmd.add_option("--ref", refs, "ROLE=PATH reference for the oracle method");
    cmd.add_flag("--hpss", hpss, "Split the accompaniment into harmonic and percussive parts");
    cmd.add_flag("--f0-filter", f0_filter, "Keep only the voice F0 partials in the voice estimate");
    cmd.add_option("--tv-update", tv_update, "TV mask increments")
        ->check(CLI::IsMember({"stationary", "as-written"}))
        ->capture_default_str();
    cmd.add_option("--lambda-scale", lambda_scale, "RPCA sparsity weight, times 1/sqrt(max(F,T))")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--period", period, "kam-repet period in frames (estimated when 0)")
        ->check(CLI::NonNegativeNumber);
    cmd.add_option("--rate", rate, "Processing sample rate; 0 keeps the file's rate")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd.add_option("--manifest", manifest, "Process every entry of a manifest file")->check(CLI::ExistingFile);
    cmd.add_option("-j,--jobs", jobs, "Concurrent manifest entries")->check(CLI::PositiveNumber);
  }

  SeparationOptions options() const {
    SeparationOptions o;
    o.method = kMethods.at(method);
    o.alpha = alpha;
    o.hpss = hpss;
    o.f0_filter = f0_filter;
    o.tv.increments = tv_update == "as-written" ? TvIncrements::as_written : TvIncrements::stationary;
    o.rpca.lambda_scale = lambda_scale;
    if (period > 0) o.repet.period_frames = period;
    if (iters > 0) {
      o.tv.n_iter = iters;
      o.rpca.n_iter = iters;
      o.kam.n_iter = iters;
    }
    for (const auto& path : kernels)
      for (auto& k : read_kernel_file(path)) o.kam.kernels.push_back(std::move(k));
    if (o.method == Method::kam_cust && o.kam.kernels.empty())
      throw Error("kam-cust needs at least one --kernels file");
    for (const auto& r : refs) {
      Reference ref = parse_reference(r);
      if (rate > 0 && ref.signal.sample_rate != rate) ref.signal = resample(ref.signal, rate);
      o.references.push_back(std::move(ref));
    }
    return o;
  }

  // Manifest references are taken as voice, then accompaniment.
  static std::vector<Reference> manifest_refs(const ManifestEntry& e, double rate) {
    static const SourceRole order[] = {SourceRole::voice, SourceRole::accompaniment};
    if (e.references.size() > 2) throw Error("manifest entries carry at most two references");
    std::vector<Reference> out;
    for (std::size_t i = 0; i < e.references.size(); ++i)
      out.push_back({order[i], load_at(e.references[i], rate)});
    return out;
  }

  std::vector<ManifestEntry> entries(const std::vector<std::string>& inputs) const {
    if (!manifest.empty()) {
      if (!inputs.empty()) throw Error("give either input files or --manifest, not both");
      return read_manifest(manifest);
    }
    if (inputs.empty()) throw Error("no input files");
    std::vector<ManifestEntry> out;
    for (const auto& in : inputs) out.push_back({in, {}, std::nullopt});
    return out;
  }
};

std::string stem_of(const fs::path& p) { return p.stem().string(); }

// --- separate --------------------------------------------------------------

int cmd_separate(const SeparationFlags& flags, const std::vector<std::string>& inputs,
                 const fs::path& out_dir, SampleFormat format) {
  const SeparationOptions base = flags.options();
  const auto entries = flags.entries(inputs);
  run_parallel(entries.size(), flags.jobs, [&](std::size_t i) {
    const ManifestEntry& e = entries[i];
    SeparationOptions opts = base;
    if (!e.references.empty()) opts.references = SeparationFlags::manifest_refs(e, flags.rate);
    const Separation sep = separate(load_at(e.mixture, flags.rate), opts);

    std::map<SourceRole, int> seen;
    for (const auto& s : sep) {
      const int n = seen[s.role]++;
      std::string name = stem_of(e.mixture) + "." + std::string(to_string(s.role));
      if (n > 0) name += "." + std::to_string(n);
      const fs::path out = out_dir / (name + ".wav");
      write_wav(out, s.signal, format);
      note(out.string());
    }
  });
  return 0;
}

// --- detect ----------------------------------------------------------------

int cmd_detect(const SeparationFlags& flags, const std::vector<std::string>& inputs,
               const fs::path& out_dir, const std::string& output, double gamma_v, double gamma_s,
               double frame_ms, double step_ms) {
  DetectionOptions base;
  base.separation = flags.options();
  const auto entries = flags.entries(inputs);
  if (!output.empty() && entries.size() != 1) throw Error("-o needs exactly one input");

  run_parallel(entries.size(), flags.jobs, [&](std::size_t i) {
    const ManifestEntry& e = entries[i];
    const AudioSignal x = load_at(e.mixture, flags.rate);
    DetectionOptions opts = base;
    opts.vad = VadConfig::from_ms(x.sample_rate, frame_ms, step_ms);
    opts.vad.voice_threshold = gamma_v;
    opts.vad.silence_threshold = gamma_s;
    if (!e.references.empty()) opts.separation.references = SeparationFlags::manifest_refs(e, flags.rate);

    const DetectionLattice lattice = detect_pipeline(x, opts);
    const fs::path out = output.empty() ? out_dir / (stem_of(e.mixture) + ".detect.csv") : fs::path(output);
    atomic_write(out, detection_to_csv(lattice));
    note(out.string());
    // manifest entries with truth segments are scored on the spot
    if (e.segments) {
      const auto truth = truth_from_segments(lattice, segments_from_text(read_text(*e.segments)));
      fs::path scores = out;
      scores.replace_extension(".json");
      atomic_write(scores, detection_score_to_json(detection_metrics(lattice.decisions(), truth), lattice.size()) + "\n");
      note(scores.string());
    }
  });
  return 0;
}

// --- train-kernel ----------------------------------------------------------

int cmd_train(const std::string& input, const std::string& output, int h, int w, double gamma,
              const std::string& scale, const std::string& label, bool real, double rate) {
  const Stft x = stft(load_at(input, rate), {});
  Kernel k = train_kernel(x, h, w, role_from_string(label));
  if (!real)
    k = binarize_kernel(k, gamma, scale == "peak" ? ThresholdScale::peak : ThresholdScale::absolute);
  write_kernel_file(output, {k});
  if (!real) note(output + ": " + std::to_string(static_cast<long>(k.values.sum())) + " of " +
                  std::to_string(k.values.size()) + " taps set");
  return 0;
}

// --- eval ------------------------------------------------------------------

int cmd_eval_bss(const std::vector<std::string>& estimates, const std::vector<std::string>& references,
                 const std::string& output) {
  if (estimates.size() != references.size())
    throw Error("need as many --est files as --ref files");
  std::vector<AudioSignal> est, ref;
  for (const auto& p : estimates) est.push_back(load_wav(p));
  for (const auto& p : references) ref.push_back(load_wav(p));
  const auto scores = score_separation(est, ref);
  std::vector<ScoreRecord> records;
  for (std::size_t i = 0; i < scores.size(); ++i) records.push_back({estimates[i], references[i], scores[i]});

  std::cout << format_score_table(records);
  if (output.empty())
    std::cout << scores_to_json(records) << '\n';
  else
    atomic_write(output, scores_to_json(records) + "\n");
  return 0;
}

int cmd_eval_vad(const std::string& csv, const std::string& segments, const std::string& output) {
  const DetectionLattice lattice = detection_from_csv(read_text(csv));
  const auto truth = truth_from_segments(lattice, segments_from_text(read_text(segments)));
  const DetectionScore score = detection_metrics(lattice.decisions(), truth);
  const std::string json = detection_score_to_json(score, lattice.size()) + "\n";
  if (output.empty())
    std::cout << json;
  else
    atomic_write(output, json);
  return 0;
}

// --- synth -----------------------------------------------------------------

int cmd_synth(const std::string& recipe, const SceneOptions& base, const fs::path& out_dir,
              SampleFormat format) {
  SceneOptions opts = base;
  opts.recipe = parse_recipe(recipe);
  const Scene scene = make_scene(opts);
  auto emit = [&](const std::string& name, const AudioSignal& x) {
    write_wav(out_dir / (name + ".wav"), x, format);
    note((out_dir / (name + ".wav")).string());
  };
  emit("mixture", scene.mixture);
  for (const auto& s : scene.sources) emit(std::string(to_string(s.component)), s.signal);
  emit("voice", scene.voice());
  emit("accompaniment", scene.accompaniment());
  atomic_write(out_dir / "segments.txt", segments_to_text(scene.voice_segments));
  note((out_dir / "segments.txt").string());
  return 0;
}

const std::map<std::string, SampleFormat> kFormats{
    {"pcm16", SampleFormat::pcm16},     {"pcm24", SampleFormat::pcm24},
    {"pcm32", SampleFormat::pcm32},     {"float32", SampleFormat::float32},
    {"float64", SampleFormat::float64},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-channel source separation and singing voice detection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "morphsep 0.1.0");

  fs::path out_dir = default_out_dir();
  SampleFormat format = SampleFormat::float32;
  auto add_output = [&](CLI::App* cmd) {
    cmd->add_option("--out-dir", out_dir, std::string("Output directory (default $") + kOutDirEnv + " or .)");
    cmd->add_option("--format", format, "WAV sample format")->transform(CLI::CheckedTransformer(kFormats));
  };

  // separate
  SeparationFlags sep_flags;
  std::vector<std::string> sep_inputs;
  auto* separate = app.add_subcommand("separate", "Separate mixtures into role-tagged WAVs");
  sep_flags.add_to(*separate);
  separate->add_option("inputs", sep_inputs, "Mixture WAV files")->check(CLI::ExistingFile);
  add_output(separate);

  // detect
  SeparationFlags det_flags;
  std::vector<std::string> det_inputs;
  std::string det_output;
  double gamma_v = 0.5, gamma_s = 1e-4, frame_ms = 8192.0 / 22.05, step_ms = 30.0;
  auto* detect = app.add_subcommand("detect", "Frame-wise singing voice detection to CSV");
  det_flags.add_to(*detect);
  detect->add_option("inputs", det_inputs, "Mixture WAV files")->check(CLI::ExistingFile);
  detect->add_option("-o,--output", det_output, "CSV path (single input only)");
  detect->add_option("--gamma-v", gamma_v, "Voice threshold on the VTMR")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  detect->add_option("--gamma-s", gamma_s, "Silence threshold on frame energy")->check(CLI::NonNegativeNumber)->capture_default_str();
  detect->add_option("--frame-ms", frame_ms, "Detection frame length")->check(CLI::PositiveNumber)->capture_default_str();
  detect->add_option("--step-ms", step_ms, "Detection step")->check(CLI::PositiveNumber)->capture_default_str();
  add_output(detect);

  // train-kernel
  std::string train_input, train_output, scale = "peak", label = "other";
  int kh = 0, kw = 0;
  double gamma_thr = 0.54, train_rate = 22050.0;
  bool real = false;
  auto* train = app.add_subcommand("train-kernel", "Train a proximity kernel on an isolated source");
  train->set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
  train->add_option("input", train_input, "Isolated source WAV")->required()->check(CLI::ExistingFile);
  train->add_option("-o,--output", train_output, "Kernel file")->required();
  train->add_option("--h", kh, "Kernel height in bins (odd)")->required()->check(CLI::PositiveNumber);
  train->add_option("--w", kw, "Kernel width in frames (odd)")->required()->check(CLI::PositiveNumber);
  train->add_option("--gamma-thr", gamma_thr, "Binarization threshold")->capture_default_str();
  train->add_option("--threshold-scale", scale, "peak: fraction of the largest value; absolute: raw value")
      ->check(CLI::IsMember({"peak", "absolute"}))
      ->capture_default_str();
  train->add_option("--label", label, "Source role of the kernel")->capture_default_str();
  train->add_flag("--real", real, "Keep real values instead of binarizing");
  train->add_option("--rate", train_rate, "Processing sample rate; 0 keeps the file's rate")->capture_default_str();

  // eval-bss
  std::vector<std::string> est_files, ref_files;
  std::string bss_output;
  auto* eval_bss = app.add_subcommand("eval-bss", "RQF and BSS scores of estimates against references");
  eval_bss->add_option("--est", est_files, "Estimate WAVs")->required()->check(CLI::ExistingFile);
  eval_bss->add_option("--ref", ref_files, "Reference WAVs, in the same order")->required()->check(CLI::ExistingFile);
  eval_bss->add_option("-o,--output", bss_output, "JSON path (default stdout)");

  // eval-vad
  std::string vad_csv, vad_segments, vad_output;
  auto* eval_vad = app.add_subcommand("eval-vad", "Score a detection CSV against truth segments");
  eval_vad->add_option("csv", vad_csv, "Detection CSV")->required()->check(CLI::ExistingFile);
  eval_vad->add_option("segments", vad_segments, "Voice segments, start<TAB>end per line")->required()->check(CLI::ExistingFile);
  eval_vad->add_option("-o,--output", vad_output, "JSON path (default stdout)");

  // synth
  std::string recipe = "vibrato,drone,clicks";
  SceneOptions scene;
  auto* synth = app.add_subcommand("synth", "Write a synthetic mixture, its sources and voice segments");
  synth->add_option("--recipe", recipe, "Components: drone, partials, vibrato, clicks, chord_loop")->capture_default_str();
  synth->add_option("--seed", scene.seed, "Random seed")->capture_default_str();
  synth->add_option("--duration", scene.duration, "Seconds")->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--rate", scene.sample_rate, "Sample rate")->check(CLI::PositiveNumber)->capture_default_str();
  add_output(synth);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    const auto subs = app.get_subcommands();
    if (subs.empty() && argc > 1 && argv[1][0] != '-')
      std::cerr << "error: unknown subcommand '" << argv[1] << "'\n\n";
    else
      std::cerr << "error: " << e.what() << "\n\n";
    std::cerr << (subs.empty() ? app.help() : subs.front()->help());
    return 2;
  }

  try {
    if (*separate) return cmd_separate(sep_flags, sep_inputs, out_dir, format);
    if (*detect) return cmd_detect(det_flags, det_inputs, out_dir, det_output, gamma_v, gamma_s, frame_ms, step_ms);
    if (*train) return cmd_train(train_input, train_output, kh, kw, gamma_thr, scale, label, real, train_rate);
    if (*eval_bss) return cmd_eval_bss(est_files, ref_files, bss_output);
    if (*eval_vad) return cmd_eval_vad(vad_csv, vad_segments, vad_output);
    if (*synth) return cmd_synth(recipe, scene, out_dir, format);
  } catch (const std::exception& e) {
    std::cerr << "morphsep: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
