#include <doctest.h>

#include <cmath>

#include "emsca/dsp.hpp"
#include "emsca/errors.hpp"
#include "emsca/leakage.hpp"
#include "emsca/sema.hpp"
#include "emsca/synth.hpp"

using namespace emsca;

namespace {

SynthConfig quiet() {
  SynthConfig cfg;
  cfg.noise_sigma = 0.0;
  cfg.gain = 1.0;
  cfg.baseline = 0.0;
  return cfg;
}

bool in_window(const SynthConfig& cfg, std::size_t s) {
  for (int j = 1; j <= 8; ++j) {
    const auto start = cfg.leak_window_start(j);
    if (s >= start && s < start + cfg.leak_width) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("noiseless zero key and plaintext leaks HW(0xCC) in every window") {
  const SynthConfig cfg = quiet();
  RandomStream rng(1);
  const Trace t = synthesize_trace(Block64{0}, Key80{}, cfg, rng);
  REQUIRE(t.samples.size() == 4096);
  for (std::size_t s = 0; s < cfg.samples_per_trace; ++s)
    CHECK(t.samples[static_cast<Eigen::Index>(s)] == (in_window(cfg, s) ? 4.0f : 0.0f));
  CHECK(t.ciphertext == encrypt(Block64{0}, Key80{}));
}

TEST_CASE("zero gain gives a constant trace at baseline * activity_gain") {
  SynthConfig cfg = quiet();
  cfg.gain = 0.0;
  cfg.baseline = 0.75;
  RandomStream rng(2);
  const Trace t = synthesize_trace(Block64{0x1234}, parse_key_hex("FFFFFFFFFFFFFFFFFFFF"), cfg, rng);
  CHECK((t.samples.array() == 1.5f).all());
}

TEST_CASE("window means equal baseline*activity + gain*HW without noise") {
  SynthConfig cfg = quiet();
  cfg.baseline = 0.5;
  cfg.gain = 1.5;
  const Key80 key = parse_key_hex("0F1E2D3C4B5A69788796");
  const TraceSet set = synthesize_set(8, key, cfg);
  for (Eigen::Index i = 0; i < set.trace_count(); ++i) {
    const Block64 state = round1_sbox_state(set.plaintexts[static_cast<std::size_t>(i)], key);
    for (int j = 1; j <= 8; ++j) {
      const auto window = set.samples.row(i).segment(static_cast<Eigen::Index>(cfg.leak_window_start(j)),
                                                     static_cast<Eigen::Index>(cfg.leak_width));
      CHECK(window.cast<double>().mean() == doctest::Approx(1.0 + 1.5 * hamming_weight(state.byte(j))).epsilon(1e-12));
    }
  }
}

TEST_CASE("same seed gives bit-identical sets regardless of threads") {
  SynthConfig cfg;
  cfg.seed = 42;
  cfg.interferers = observed_interferers(0.3);
  const Key80 key = parse_key_hex("00112233445566778899");
  cfg.threads = 1;
  const TraceSet a = synthesize_set(64, key, cfg);
  cfg.threads = 4;
  const TraceSet b = synthesize_set(64, key, cfg);
  CHECK(a.samples == b.samples);
  CHECK(a.plaintexts == b.plaintexts);
  CHECK(a.ciphertexts == b.ciphertexts);
  CHECK(a.key == key);
  cfg.seed = 43;
  CHECK_FALSE(synthesize_set(64, key, cfg).samples == a.samples);
}

TEST_CASE("2048-trace optimised-scale set") {
  SynthConfig cfg;
  cfg.seed = 2048;
  const TraceSet set = synthesize_set(2048, parse_key_hex("AAAAAAAAAAAAAAAAAAAA"), cfg);
  CHECK(set.trace_count() == 2048);
  // Each plaintext byte value: expected count 8 per position, binomial sd ~2.83.
  const double expected = 2048.0 / 256.0;
  const double sd = std::sqrt(2048.0 * (1.0 / 256.0) * (255.0 / 256.0));
  for (int j = 1; j <= 8; ++j) {
    std::array<int, 256> counts{};
    for (const auto& pt : set.plaintexts) ++counts[pt.byte(j)];
    for (int v = 0; v < 256; ++v) CHECK(std::abs(counts[static_cast<std::size_t>(v)] - expected) <= 5.0 * sd);
  }
}

TEST_CASE("idle sets") {
  SynthConfig cfg = quiet();
  cfg.baseline = 1.25;
  const TraceSet idle = synthesize_idle_set(4, cfg);
  CHECK((idle.samples.array() == 1.25f).all());
  CHECK_FALSE(idle.key.has_value());
  CHECK_FALSE(idle.has_ciphertexts());

  cfg.noise_sigma = 0.01;
  cfg.seed = 5;
  CHECK(synthesize_idle_set(4, cfg).samples == synthesize_idle_set(4, cfg).samples);

  const TraceSet active = synthesize_set(32, Key80{}, cfg);
  const TraceSet idle_noisy = synthesize_idle_set(32, cfg);
  const double ratio = compare_sets(active, idle_noisy).ratio_rms;
  CHECK(ratio == doctest::Approx(cfg.activity_gain).epsilon(0.1));
}

TEST_CASE("interferer-only spectrum peaks at the configured bins") {
  SynthConfig cfg = quiet();
  cfg.gain = 0.0;
  cfg.baseline = 0.0;
  cfg.interferers = observed_interferers(1.0);
  RandomStream rng(9);
  const Trace t = synthesize_trace(Block64{0}, Key80{}, cfg, rng);
  const Spectrum s = fft_magnitude(t, cfg.sample_rate_hz);
  const auto peaks = spectral_peaks(s, cfg.interferers.size());
  REQUIRE(peaks.size() == cfg.interferers.size());
  std::vector<Eigen::Index> bins;
  for (const auto& p : peaks) bins.push_back(p.bin);
  std::sort(bins.begin(), bins.end());
  for (std::size_t i = 0; i < bins.size(); ++i)
    CHECK(bins[i] == static_cast<Eigen::Index>(std::lround(cfg.interferers[i].frequency_hz / s.bin_resolution_hz)));
}

TEST_CASE("configuration errors") {
  SynthConfig cfg;
  cfg.first_leak_offset = 4096 - 8 * 256 + 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SynthConfig{};
  cfg.leak_width = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SynthConfig{};
  cfg.noise_sigma = -1;
  CHECK_THROWS_AS(synthesize_set(2, Key80{}, cfg), ConfigError);
  CHECK_THROWS_AS(synthesize_set(0, Key80{}, SynthConfig{}), ConfigError);
  CHECK_NOTHROW(SynthConfig{}.validate());
}
