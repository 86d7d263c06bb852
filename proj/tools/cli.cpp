#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "emsca/bfa.hpp"
#include "emsca/cema.hpp"
#include "emsca/dsp.hpp"
#include "emsca/errors.hpp"
#include "emsca/report.hpp"
#include "emsca/sema.hpp"
#include "emsca/synth.hpp"
#include "emsca/trace_io.hpp"

namespace emsca::cli {
namespace {

using nlohmann::json;

/// Invalid flag value; maps to the usage exit status.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SynthFlags {
  double gain = 1.0;
  double noise = 1.0;
  double baseline = 2.0;
  double activity_gain = 2.0;
  double sample_rate = 2.5e9;
  std::size_t samples = 4096;
  std::size_t offset = 512;
  std::size_t spacing = 256;
  std::size_t width = 16;
  std::string interferers = "none";
  double interferer_amplitude = 0.5;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--gain", gain, "Leakage gain g")->capture_default_str();
    cmd.add_option("--noise", noise, "Gaussian noise sigma (V)")->capture_default_str();
    cmd.add_option("--baseline", baseline, "Idle amplitude (V)")->capture_default_str();
    cmd.add_option("--activity-gain", activity_gain, "Amplitude multiplier while encrypting")->capture_default_str();
    cmd.add_option("--sample-rate", sample_rate, "Sample rate (Hz)")->capture_default_str();
    cmd.add_option("--samples", samples, "Samples per trace")->capture_default_str();
    cmd.add_option("--leak-offset", offset, "First leakage window (sample)")->capture_default_str();
    cmd.add_option("--leak-spacing", spacing, "Distance between leakage windows")->capture_default_str();
    cmd.add_option("--leak-width", width, "Leakage window width")->capture_default_str();
    cmd.add_option("--interferers", interferers, "none | paper (observed tone set) | F:A[,F:A...] (Hz:V)")->capture_default_str();
    cmd.add_option("--interferer-amplitude", interferer_amplitude, "Amplitude of each preset tone (V)")
        ->capture_default_str();
  }

  SynthConfig config(std::uint64_t seed, std::size_t threads) const;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) parts.push_back(item);
  return parts;
}

double parse_number(const std::string& text, const std::string& flag) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError(flag + ": '" + text + "' is not a number");
  }
}

std::pair<double, double> parse_pair(const std::string& item, const std::string& flag) {
  const auto colon = item.find(':');
  if (colon == std::string::npos) throw UsageError(flag + ": expected A:B, got '" + item + "'");
  return {parse_number(item.substr(0, colon), flag), parse_number(item.substr(colon + 1), flag)};
}

std::vector<BandSpec> parse_bands(const std::string& list, BandMode mode, const std::string& flag) {
  std::vector<BandSpec> bands;
  for (const auto& item : split(list, ',')) {
    const auto [lo, hi] = parse_pair(item, flag);
    bands.push_back({lo, hi, mode});
  }
  return bands;
}

SynthConfig SynthFlags::config(std::uint64_t seed, std::size_t threads) const {
  SynthConfig cfg;
  cfg.gain = gain;
  cfg.noise_sigma = noise;
  cfg.baseline = baseline;
  cfg.activity_gain = activity_gain;
  cfg.sample_rate_hz = sample_rate;
  cfg.samples_per_trace = samples;
  cfg.first_leak_offset = offset;
  cfg.leak_spacing = spacing;
  cfg.leak_width = width;
  cfg.seed = seed;
  cfg.threads = threads;
  if (interferers == "paper") {
    cfg.interferers = observed_interferers(interferer_amplitude);
  } else if (interferers != "none" && !interferers.empty()) {
    for (const auto& item : split(interferers, ',')) {
      const auto [f, a] = parse_pair(item, "--interferers");
      cfg.interferers.push_back({f, a});
    }
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

Key80 key_flag(const std::string& text, const std::string& flag) {
  try {
    return parse_key_hex(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

Block64 block_flag(const std::string& text, const std::string& flag) {
  try {
    return parse_block_hex(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

void emit(std::ostream& out, const json& doc) { out << doc.dump(2) << '\n'; }

struct AttackFlags {
  std::string filter;
  std::string notch;
  double taper = 0.0;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--filter", filter, "Pass band(s) LO:HI[,LO:HI...] in Hz applied before correlating");
    cmd.add_option("--notch", notch, "Notch band(s) LO:HI[,LO:HI...] in Hz");
    cmd.add_option("--taper", taper, "Raised-cosine skirt width (Hz), 0 = brick wall")->capture_default_str();
  }

  AttackOptions options(std::size_t threads) const {
    AttackOptions o;
    o.bands = parse_bands(filter, BandMode::pass, "--filter");
    const auto notches = parse_bands(notch, BandMode::notch, "--notch");
    o.bands.insert(o.bands.end(), notches.begin(), notches.end());
    o.taper_hz = taper;
    o.threads = threads;
    return o;
  }
};

int dispatch(CLI::App& app, std::ostream& out, std::ostream& err, const std::vector<std::string>& args);

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"EM side-channel analysis of PRESENT-80", "emsca"};
  try {
    return dispatch(app, out, err, args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

namespace {

int dispatch(CLI::App& app, std::ostream& out, std::ostream& err, const std::vector<std::string>& args) {
  app.require_subcommand(1);
  std::size_t threads = 0;
  std::uint64_t seed = 0;
  bool csv = false;
  bool json_out = false;

  auto add_threads = [&](CLI::App* c) {
    c->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
  };
  auto add_format = [&](CLI::App* c) {
    auto* j = c->add_flag("--json", json_out, "JSON output (default)");
    c->add_flag("--csv", csv, "CSV output")->excludes(j);
  };

  // gen
  auto* gen = app.add_subcommand("gen", "Synthesize an EMTS trace set");
  std::size_t gen_traces = 0;
  std::string gen_key, gen_out;
  bool gen_idle = false;
  SynthFlags gen_synth;
  gen->add_option("--traces", gen_traces, "Number of traces")->required();
  gen->add_option("--key", gen_key, "Master key, 20 hex digits");
  gen->add_option("--seed", seed, "Master seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output EMTS path")->required();
  gen->add_flag("--idle", gen_idle, "Non-encrypting reference set");
  gen_synth.add_to(*gen);
  add_threads(gen);

  // attack
  auto* attack = app.add_subcommand("attack", "Correlation attack on key bytes 1-8");
  std::string attack_in, surface_out;
  std::size_t top = 5;
  int surface_byte = 1;
  AttackFlags attack_flags;
  attack->add_option("--in", attack_in, "Input EMTS path")->required();
  attack->add_option("--top", top, "Candidates listed per byte")->capture_default_str();
  attack->add_option("--surface-out", surface_out, "Write one byte's correlation surface as CSV");
  attack->add_option("--surface-byte", surface_byte, "Byte (1-8) exported by --surface-out")->capture_default_str();
  attack_flags.add_to(*attack);
  add_format(attack);
  add_threads(attack);

  // sema
  auto* sema = app.add_subcommand("sema", "Compare encrypting and idle amplitudes");
  std::string sema_active, sema_idle;
  sema->add_option("--active", sema_active, "Encrypting EMTS set")->required();
  sema->add_option("--idle", sema_idle, "Idle EMTS set")->required();
  add_format(sema);

  // semfa
  auto* semfa = app.add_subcommand("semfa", "Spectrum or spectrogram of a trace set");
  std::string semfa_in, semfa_idle;
  std::size_t peaks = 10;
  long semfa_trace = -1;
  bool semfa_spectrogram = false;
  Eigen::Index window = 256, overlap = 128;
  semfa->add_option("--in", semfa_in, "Input EMTS path")->required();
  semfa->add_option("--idle", semfa_idle, "Optional idle set for comparison");
  semfa->add_option("--peaks", peaks, "Strongest spectral peaks listed")->capture_default_str();
  semfa->add_option("--trace", semfa_trace, "Single trace index (default: mean over traces)");
  semfa->add_flag("--spectrogram", semfa_spectrogram, "Short-time spectrum instead");
  semfa->add_option("--window", window, "Spectrogram window length")->capture_default_str();
  semfa->add_option("--overlap", overlap, "Spectrogram overlap")->capture_default_str();
  add_format(semfa);

  // filter
  auto* filter = app.add_subcommand("filter", "Band filter a trace set");
  std::string filter_in, filter_out, filter_band, filter_mode = "pass", filter_preset;
  double half_width = 1e6, filter_taper = 0.0;
  filter->add_option("--in", filter_in, "Input EMTS path")->required();
  filter->add_option("--out", filter_out, "Output EMTS path")->required();
  filter->add_option("--band", filter_band, "LO:HI[,LO:HI...] in Hz");
  filter->add_option("--preset", filter_preset, "'paper': bands around the observed interferer set");
  filter->add_option("--half-width", half_width, "Preset band half-width (Hz)")->capture_default_str();
  filter->add_option("--mode", filter_mode, "pass | notch")->capture_default_str();
  filter->add_option("--taper", filter_taper, "Raised-cosine skirt width (Hz)")->capture_default_str();
  add_threads(filter);

  // sr
  auto* sr = app.add_subcommand("sr", "Success rate over seeded synthetic attacks");
  std::string sr_pattern;
  std::size_t sr_runs = 20, sr_traces = 256;
  SynthFlags sr_synth;
  AttackFlags sr_attack;
  sr->add_option("--pattern", sr_pattern, "Key byte pattern: 00 | 55 | aa | ff")->required();
  sr->add_option("--runs", sr_runs, "Independent attacks")->capture_default_str();
  sr->add_option("--traces", sr_traces, "Traces per attack")->capture_default_str();
  sr->add_option("--seed", seed, "Master seed")->capture_default_str();
  sr_synth.add_to(*sr);
  sr_attack.add_to(*sr);
  add_format(sr);
  add_threads(sr);

  // bfa
  auto* bfa = app.add_subcommand("bfa", "Brute-force the 16 key bits outside K1");
  std::string bfa_in, bfa_known, bfa_pt, bfa_ct;
  bfa->add_option("--in", bfa_in, "EMTS set with ciphertexts; attacked unless --known is given");
  bfa->add_option("--known", bfa_known, "Known top 8 key bytes, 16 hex digits");
  bfa->add_option("--pt", bfa_pt, "Known plaintext (with --ct)");
  bfa->add_option("--ct", bfa_ct, "Known ciphertext (with --pt)");
  add_threads(bfa);

  // encrypt / decrypt
  auto* enc = app.add_subcommand("encrypt", "PRESENT-80 encryption of one block");
  auto* dec = app.add_subcommand("decrypt", "PRESENT-80 decryption of one block");
  std::string cipher_key, cipher_block;
  bool cipher_json = false;
  for (auto* c : {enc, dec}) {
    c->add_option("--key", cipher_key, "Key, 20 hex digits")->required();
    c->add_flag("--json", cipher_json, "JSON output");
  }
  enc->add_option("--pt", cipher_block, "Plaintext, 16 hex digits")->required();
  dec->add_option("--ct", cipher_block, "Ciphertext, 16 hex digits")->required();

  std::vector<const char*> argv{"emsca"};
  for (const auto& a : args) argv.push_back(a.c_str());
  app.parse(static_cast<int>(argv.size()), argv.data());

  if (gen->parsed()) {
    const SynthConfig cfg = gen_synth.config(seed, threads);
    TraceSet set;
    if (gen_idle) {
      set = synthesize_idle_set(gen_traces, cfg);
    } else {
      if (gen_key.empty()) throw UsageError("--key is required unless --idle is given");
      set = synthesize_set(gen_traces, key_flag(gen_key, "--key"), cfg);
    }
    const auto bytes = save_trace_set(set, gen_out);
    emit(out, {{"schema", "emsca.gen/1"},
               {"path", gen_out},
               {"traces", gen_traces},
               {"bytes", bytes},
               {"idle", gen_idle},
               {"config", to_json(cfg)}});
    return kExitOk;
  }

  if (attack->parsed()) {
    const AttackOptions options = attack_flags.options(threads);
    const TraceSet set = load_trace_set(attack_in);
    const AttackReport report = attack_key(set, options);
    if (csv)
      write_csv(out, report, top);
    else
      emit(out, to_json(report, top, set.key));
    if (!surface_out.empty()) {
      const TraceSet source = options.bands.empty() ? set : band_filter(set, options.bands, options.taper_hz);
      std::ofstream f(surface_out);
      if (!f) throw IoError("cannot open " + surface_out);
      write_csv(f, CorrelationEngine(source).surface(KeyBytePosition(surface_byte)));
    }
    return report.all_confident() ? kExitOk : kExitUnconfident;
  }

  if (sema->parsed()) {
    const SemaReport report = compare_sets(load_trace_set(sema_active), load_trace_set(sema_idle));
    if (csv)
      write_csv(out, report);
    else
      emit(out, to_json(report));
    return kExitOk;
  }

  if (semfa->parsed()) {
    const TraceSet set = load_trace_set(semfa_in);
    if (semfa_trace >= set.trace_count()) throw UsageError("--trace is beyond the set");
    if (semfa_spectrogram) {
      const Eigen::VectorXd samples =
          set.samples.row(std::max<long>(semfa_trace, 0)).transpose().cast<double>();
      const Spectrogram sg = spectrogram(samples, set.sample_rate_hz, window, overlap);
      if (csv)
        write_csv(out, sg);
      else
        emit(out, to_json(sg));
      return kExitOk;
    }
    auto spectrum_of = [&](const TraceSet& s) {
      return semfa_trace >= 0 ? fft_magnitude(s.trace(semfa_trace), s.sample_rate_hz) : mean_spectrum(s);
    };
    const Spectrum spectrum = spectrum_of(set);
    if (csv) {
      write_csv(out, spectrum);
      return kExitOk;
    }
    json doc = {{"schema", "emsca.semfa/1"}, {"traces", set.trace_count()}, {"spectrum", to_json(spectrum, peaks)}};
    if (!semfa_idle.empty()) doc["idle_spectrum"] = to_json(spectrum_of(load_trace_set(semfa_idle)), peaks);
    emit(out, doc);
    return kExitOk;
  }

  if (filter->parsed()) {
    BandMode mode;
    if (filter_mode == "pass")
      mode = BandMode::pass;
    else if (filter_mode == "notch")
      mode = BandMode::notch;
    else
      throw UsageError("--mode must be pass or notch");
    std::vector<BandSpec> bands = parse_bands(filter_band, mode, "--band");
    if (filter_preset == "paper") {
      for (const auto& tone : observed_interferers(1.0))
        bands.push_back({tone.frequency_hz - half_width, tone.frequency_hz + half_width, mode});
    } else if (!filter_preset.empty()) {
      throw UsageError("--preset: unknown preset '" + filter_preset + "'");
    }
    if (bands.empty()) throw UsageError("give --band or --preset");
    const TraceSet set = load_trace_set(filter_in);
    const auto bytes = save_trace_set(band_filter(set, bands, filter_taper, threads), filter_out);
    json list = json::array();
    for (const auto& b : bands) list.push_back({{"low_hz", b.low_hz}, {"high_hz", b.high_hz}});
    emit(out, {{"schema", "emsca.filter/1"},
               {"path", filter_out},
               {"mode", filter_mode},
               {"bands", list},
               {"traces", set.trace_count()},
               {"bytes", bytes}});
    return kExitOk;
  }

  if (sr->parsed()) {
    KeyPattern pattern;
    try {
      pattern = parse_key_pattern(sr_pattern);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--pattern: ") + e.what());
    }
    const SrReport report =
        success_rate(pattern, sr_runs, sr_traces, sr_synth.config(seed, threads), sr_attack.options(threads));
    if (csv) {
      write_csv(out, report);
    } else {
      json doc = to_json(report);
      doc["seed"] = seed;
      emit(out, doc);
    }
    return kExitOk;
  }

  if (bfa->parsed()) {
    std::optional<TraceSet> set;
    if (!bfa_in.empty()) set = load_trace_set(bfa_in);
    PartialKey partial;
    if (!bfa_known.empty()) {
      partial.known_high = block_flag(bfa_known, "--known").bits;
    } else if (set) {
      const AttackReport report = attack_key(*set, AttackOptions{.threads = threads});
      partial.known_high = report.recovered_high();
    } else {
      throw UsageError("give --known or --in");
    }
    KnownPair pair;
    std::optional<KnownPair> verify;
    if (!bfa_pt.empty() || !bfa_ct.empty()) {
      pair = {block_flag(bfa_pt, "--pt"), block_flag(bfa_ct, "--ct")};
    } else if (set && set->has_ciphertexts()) {
      pair = {set->plaintexts[0], set->ciphertexts[0]};
      if (set->trace_count() > 1) verify = KnownPair{set->plaintexts[1], set->ciphertexts[1]};
    } else {
      throw UsageError("give --pt/--ct or an --in set with ciphertexts");
    }
    const BfaResult result = complete_key(partial, pair, verify, threads);
    json doc = to_json(result);
    doc["known_high"] = to_hex(Block64{partial.known_high});
    emit(out, doc);
    return result.status == BfaStatus::found ? kExitOk : kExitUnconfident;
  }

  const bool encrypting = enc->parsed();
  const Key80 key = key_flag(cipher_key, "--key");
  const Block64 input = block_flag(cipher_block, encrypting ? "--pt" : "--ct");
  const Block64 result = encrypting ? encrypt(input, key) : decrypt(input, key);
  if (cipher_json)
    emit(out, {{"key", to_hex(key)}, {encrypting ? "pt" : "ct", to_hex(input)}, {encrypting ? "ct" : "pt", to_hex(result)}});
  else
    out << to_hex(result) << '\n';
  (void)err;
  return kExitOk;
}

}  // namespace
}  // namespace emsca::cli
