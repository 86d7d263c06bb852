#include "emsca/synth.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "emsca/errors.hpp"
#include "emsca/leakage.hpp"
#include "emsca/parallel.hpp"
#include "emsca/present.hpp"

namespace emsca {
namespace {

void add_interferers(Eigen::VectorXd& samples, const SynthConfig& cfg, RandomStream& rng) {
  for (const auto& tone : cfg.interferers) {
    const double phase = 2.0 * std::numbers::pi * rng.uniform();
    const double step = 2.0 * std::numbers::pi * tone.frequency_hz / cfg.sample_rate_hz;
    for (Eigen::Index s = 0; s < samples.size(); ++s)
      samples[s] += tone.amplitude * std::sin(step * static_cast<double>(s) + phase);
  }
}

void add_noise(Eigen::VectorXd& samples, double sigma, RandomStream& rng) {
  if (sigma == 0.0) return;
  for (Eigen::Index s = 0; s < samples.size(); ++s) samples[s] += sigma * rng.gaussian();
}

Trace render(const Eigen::VectorXd& samples, Block64 plaintext, std::optional<Block64> ciphertext) {
  return {samples.cast<float>(), plaintext, ciphertext};
}

TraceSet collect(const std::vector<Trace>& traces, const SynthConfig& cfg, std::optional<Key80> key) {
  return TraceSet::from_traces(traces, cfg.sample_rate_hz, key);
}

}  // namespace

std::vector<Interferer> observed_interferers(double amplitude) {
  std::vector<Interferer> tones;
  for (double mhz : {11.25, 22.5, 45.08, 56.33, 78.83, 90.08, 112.66})
    tones.push_back({mhz * 1e6, amplitude});
  return tones;
}

void SynthConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("synthesis config: " + what); };
  if (!std::isfinite(gain) || !std::isfinite(baseline) || !std::isfinite(activity_gain))
    fail("gain, baseline and activity_gain must be finite");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) fail("noise_sigma must be >= 0");
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) fail("sample_rate_hz must be > 0");
  if (samples_per_trace == 0 || leak_spacing == 0 || leak_width == 0)
    fail("samples_per_trace, leak_spacing and leak_width must be > 0");
  if (leak_width > leak_spacing) fail("leak_width exceeds leak_spacing (windows would overlap)");
  if (first_leak_offset + kRecoverableBytes * leak_spacing > samples_per_trace)
    fail("first_leak_offset + 8*leak_spacing exceeds samples_per_trace");
  for (const auto& tone : interferers)
    if (!std::isfinite(tone.frequency_hz) || tone.frequency_hz < 0.0 || !std::isfinite(tone.amplitude))
      fail("interferer frequency must be finite and >= 0");
}

Trace synthesize_trace(Block64 plaintext, const Key80& key, const SynthConfig& cfg, RandomStream& rng) {
  cfg.validate();
  Eigen::VectorXd samples = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(cfg.samples_per_trace),
                                                      cfg.baseline * cfg.activity_gain);
  const Block64 state = round1_sbox_state(plaintext, key);
  for (int j = 1; j <= kRecoverableBytes; ++j) {
    const double energy = leakage_energy(state.byte(j), cfg.gain, 0.0);
    samples.segment(static_cast<Eigen::Index>(cfg.leak_window_start(j)),
                    static_cast<Eigen::Index>(cfg.leak_width))
        .array() += energy;
  }
  add_interferers(samples, cfg, rng);
  add_noise(samples, cfg.noise_sigma, rng);
  return render(samples, plaintext, encrypt(plaintext, key));
}

TraceSet synthesize_set(std::size_t n_traces, const Key80& key, const SynthConfig& cfg) {
  if (n_traces == 0) throw ConfigError("synthesize_set needs at least one trace");
  cfg.validate();
  std::vector<Trace> traces(n_traces);
  parallel_for(n_traces, cfg.threads, [&](std::size_t i) {
    RandomStream rng = RandomStream::derive(cfg.seed, i);
    const Block64 plaintext{rng.next_u64()};
    traces[i] = synthesize_trace(plaintext, key, cfg, rng);
  });
  return collect(traces, cfg, key);
}

TraceSet synthesize_idle_set(std::size_t n_traces, const SynthConfig& cfg) {
  if (n_traces == 0) throw ConfigError("synthesize_idle_set needs at least one trace");
  cfg.validate();
  std::vector<Trace> traces(n_traces);
  parallel_for(n_traces, cfg.threads, [&](std::size_t i) {
    RandomStream rng = RandomStream::derive(cfg.seed, i);
    Eigen::VectorXd samples =
        Eigen::VectorXd::Constant(static_cast<Eigen::Index>(cfg.samples_per_trace), cfg.baseline);
    add_interferers(samples, cfg, rng);
    add_noise(samples, cfg.noise_sigma, rng);
    traces[i] = render(samples, Block64{}, std::nullopt);
  });
  return collect(traces, cfg, std::nullopt);
}

}  // namespace emsca
