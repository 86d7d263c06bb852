#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "emsca/dsp.hpp"
#include "emsca/errors.hpp"
#include "emsca/synth.hpp"

using namespace emsca;

namespace {

constexpr double kRate = 1.0e6;

Eigen::VectorXd tone(Eigen::Index n, double cycles_per_n, double amplitude = 1.0, double phase = 0.0) {
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i)
    x[i] = amplitude * std::sin(2.0 * std::numbers::pi * cycles_per_n * static_cast<double>(i) / static_cast<double>(n) + phase);
  return x;
}

TraceSet as_set(const Eigen::VectorXd& x, double rate) {
  TraceSet set;
  set.samples = x.transpose().cast<float>();
  set.plaintexts = {Block64{7}};
  set.ciphertexts = {Block64{9}};
  set.key = Key80{1, 2};
  set.sample_rate_hz = rate;
  return set;
}

}  // namespace

TEST_CASE("fft_magnitude") {
  SUBCASE("constant trace puts everything in DC") {
    const Spectrum s = fft_magnitude(Eigen::VectorXd::Constant(64, 2.0), kRate);
    CHECK(s.magnitudes.size() == 33);
    CHECK(s.magnitudes[0] == doctest::Approx(128.0));
    CHECK(s.magnitudes.tail(32).maxCoeff() < 1e-9);
    CHECK(s.bin_resolution_hz == doctest::Approx(kRate / 64));
  }
  SUBCASE("bin-centred sinusoid") {
    const Spectrum s = fft_magnitude(tone(256, 12), kRate);
    Eigen::Index peak;
    s.magnitudes.maxCoeff(&peak);
    CHECK(peak == 12);
    for (Eigen::Index k = 0; k < s.magnitudes.size(); ++k)
      if (k != 12) CHECK(s.magnitudes[k] <= 1e-6 * s.magnitudes[12]);
  }
  SUBCASE("Parseval against direct summation") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    for (Eigen::Index n : {64, 101, 500}) {
      Eigen::VectorXd x(n);
      for (auto& v : x) v = g(rng);
      const double direct = x.squaredNorm();
      CHECK(std::abs(spectral_energy(fft_magnitude(x, kRate), n) - direct) <= 1e-9 * direct);
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(fft_magnitude(Eigen::VectorXd::Zero(1), kRate), ConfigError);
    Eigen::VectorXd bad = Eigen::VectorXd::Zero(8);
    bad[3] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(fft_magnitude(bad, kRate), DataError);
  }
}

TEST_CASE("spectrogram") {
  SUBCASE("frame count formula") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
      const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 2000);
      const Eigen::Index w = 2 + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(n - 1));
      const Eigen::Index o = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(w));
      CHECK(spectrogram_frame_count(n, w, o) == (n - w) / (w - o) + 1);
    }
    CHECK(spectrogram(tone(300, 30), kRate, 64, 16).magnitudes.rows() == (300 - 64) / 48 + 1);
  }
  SUBCASE("stationary tone peaks in the same bin every frame") {
    const Spectrogram sg = spectrogram(tone(1024, 128), kRate, 64, 32);
    for (Eigen::Index f = 0; f < sg.magnitudes.rows(); ++f) {
      Eigen::Index bin;
      sg.magnitudes.row(f).maxCoeff(&bin);
      CHECK(bin == 8);
    }
  }
  SUBCASE("tone present only in the second half") {
    Eigen::VectorXd x = tone(1024, 128);
    x.head(512).setZero();
    const Spectrogram sg = spectrogram(x, kRate, 64, 0);
    CHECK(sg.magnitudes.rows() == 16);
    for (Eigen::Index f = 0; f < 8; ++f) CHECK(sg.magnitudes(f, 8) < 1e-12);
    for (Eigen::Index f = 8; f < 16; ++f) CHECK(sg.magnitudes(f, 8) > 10.0);
  }
  SUBCASE("invalid framing") {
    CHECK_THROWS_AS(spectrogram(tone(100, 3), kRate, 200, 0), ConfigError);
    CHECK_THROWS_AS(spectrogram(tone(100, 3), kRate, 32, 32), ConfigError);
    CHECK_THROWS_AS(spectrogram(tone(100, 3), kRate, 32, -1), ConfigError);
  }
}

TEST_CASE("band_filter") {
  const Eigen::Index n = 1000;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  Eigen::VectorXd x(n);
  for (auto& v : x) v = g(rng);
  const TraceSet set = as_set(x, kRate);

  SUBCASE("full pass band is the identity") {
    const TraceSet out = band_filter(set, BandSpec{0.0, kRate / 2, BandMode::pass});
    CHECK((out.samples - set.samples).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(out.plaintexts == set.plaintexts);
    CHECK(out.ciphertexts == set.ciphertexts);
    CHECK(out.key == set.key);
    CHECK(out.samples.cols() == n);
  }
  SUBCASE("notch removes an injected tone by at least 60 dB") {
    // 2.5 GS/s, 4096 samples, 45.08 MHz as in the observed interferer set.
    SynthConfig cfg;
    cfg.noise_sigma = 0.0;
    cfg.gain = 0.0;
    cfg.baseline = 0.0;
    cfg.interferers = {{45.08e6, 1.0}};
    RandomStream r(3);
    const TraceSet tone_set = TraceSet::from_traces({synthesize_trace(Block64{0}, Key80{}, cfg, r)}, cfg.sample_rate_hz);
    const TraceSet out = band_filter(tone_set, BandSpec{44.08e6, 46.08e6, BandMode::notch});
    const Spectrum before = fft_magnitude(tone_set.trace(0), cfg.sample_rate_hz);
    const Spectrum after = fft_magnitude(out.trace(0), cfg.sample_rate_hz);
    const auto bin = static_cast<Eigen::Index>(std::lround(45.08e6 / before.bin_resolution_hz));
    CHECK(20.0 * std::log10(before.magnitudes[bin] / std::max(after.magnitudes[bin], 1e-300)) >= 60.0);
  }
  SUBCASE("filtering is idempotent") {
    const std::vector<BandSpec> bands{{50e3, 150e3, BandMode::pass}, {90e3, 110e3, BandMode::notch}};
    const TraceSet once = band_filter(set, bands);
    const TraceSet twice = band_filter(once, bands);
    CHECK((once.samples - twice.samples).cwiseAbs().maxCoeff() <= 1e-6);
  }
  SUBCASE("filtering is linear") {
    Eigen::VectorXd y(n);
    for (auto& v : y) v = g(rng);
    const BandSpec band{120e3, 240e3, BandMode::pass};
    const std::span<const BandSpec> bands(&band, 1);
    const Eigen::VectorXd lhs = filter_samples(2.5 * x - 0.75 * y, kRate, bands);
    const Eigen::VectorXd rhs = 2.5 * filter_samples(x, kRate, bands) - 0.75 * filter_samples(y, kRate, bands);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-6);
  }
  SUBCASE("removed region is empty") {
    const BandSpec band{100e3, 300e3, BandMode::notch};
    const Eigen::VectorXd out = filter_samples(x, kRate, std::span<const BandSpec>(&band, 1));
    const Spectrum in_s = fft_magnitude(x, kRate);
    const Spectrum out_s = fft_magnitude(out, kRate);
    for (Eigen::Index k = 0; k < out_s.magnitudes.size(); ++k) {
      const double f = out_s.bin_frequency(k);
      if (f >= 100e3 && f <= 300e3) CHECK(out_s.magnitudes[k] <= 1e-6 * in_s.magnitudes.maxCoeff());
    }
  }
  SUBCASE("taper keeps the passband and rolls off smoothly") {
    const BandSpec band{100e3, 200e3, BandMode::pass};
    const Eigen::VectorXd mask = band_mask(n, kRate, std::span<const BandSpec>(&band, 1), 20e3);
    CHECK(mask[150] == 1.0);  // 150 kHz
    CHECK(mask[90] > 0.0);
    CHECK(mask[90] < 1.0);
    CHECK(mask[70] == 0.0);
    CHECK(mask[n - 150] == 1.0);  // mirrored bin
  }
  SUBCASE("band beyond Nyquist") {
    CHECK_THROWS_AS(band_filter(set, BandSpec{0.0, kRate, BandMode::pass}), ConfigError);
    CHECK_THROWS_AS(band_filter(set, BandSpec{300e3, 200e3, BandMode::pass}), ConfigError);
  }
}
