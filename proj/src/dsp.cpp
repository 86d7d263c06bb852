#include "emsca/dsp.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "emsca/errors.hpp"
#include "emsca/parallel.hpp"

namespace emsca {
namespace {

using ComplexVector = std::vector<std::complex<double>>;

ComplexVector forward(const Eigen::Ref<const Eigen::VectorXd>& samples) {
  Eigen::FFT<double> fft;
  std::vector<double> time(samples.data(), samples.data() + samples.size());
  ComplexVector freq;
  fft.fwd(freq, time);
  return freq;
}

void require_finite(const Eigen::Ref<const Eigen::VectorXd>& samples) {
  if (!samples.allFinite()) throw DataError("spectrum input contains non-finite samples");
}

double edge_window(double f, double low, double high, double taper) {
  if (f >= low && f <= high) return 1.0;
  if (taper <= 0.0) return 0.0;
  const double distance = f < low ? low - f : f - high;
  if (distance >= taper) return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * distance / taper));
}

}  // namespace

Spectrum fft_magnitude(const Eigen::Ref<const Eigen::VectorXd>& samples, double sample_rate_hz) {
  if (samples.size() < 2) throw ConfigError("spectrum needs at least two samples");
  require_finite(samples);
  const ComplexVector freq = forward(samples);
  const Eigen::Index n = samples.size();
  Spectrum s;
  s.magnitudes.resize(n / 2 + 1);
  for (Eigen::Index k = 0; k <= n / 2; ++k) s.magnitudes[k] = std::abs(freq[static_cast<std::size_t>(k)]);
  s.bin_resolution_hz = sample_rate_hz / static_cast<double>(n);
  return s;
}

Spectrum fft_magnitude(const Trace& trace, double sample_rate_hz) {
  return fft_magnitude(trace.samples.cast<double>(), sample_rate_hz);
}

Spectrum mean_spectrum(const TraceSet& set) {
  Spectrum mean;
  for (Eigen::Index t = 0; t < set.trace_count(); ++t) {
    const Eigen::VectorXd row = set.samples.row(t).transpose().cast<double>();
    Spectrum s = fft_magnitude(row, set.sample_rate_hz);
    if (t == 0)
      mean = std::move(s);
    else
      mean.magnitudes += s.magnitudes;
  }
  mean.magnitudes /= static_cast<double>(set.trace_count());
  return mean;
}

double spectral_energy(const Spectrum& spectrum, Eigen::Index n) {
  const Eigen::Index bins = spectrum.magnitudes.size();
  double total = 0.0;
  for (Eigen::Index k = 0; k < bins; ++k) {
    const double m2 = spectrum.magnitudes[k] * spectrum.magnitudes[k];
    const bool unpaired = k == 0 || (n % 2 == 0 && k == n / 2);
    total += unpaired ? m2 : 2.0 * m2;
  }
  return total / static_cast<double>(n);
}

std::vector<SpectralPeak> spectral_peaks(const Spectrum& spectrum, std::size_t count) {
  const auto& m = spectrum.magnitudes;
  std::vector<SpectralPeak> peaks;
  for (Eigen::Index k = 1; k < m.size(); ++k) {
    const bool left = m[k] > m[k - 1];
    const bool right = k + 1 == m.size() || m[k] >= m[k + 1];
    if (left && right) peaks.push_back({k, spectrum.bin_frequency(k), m[k]});
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const SpectralPeak& a, const SpectralPeak& b) { return a.magnitude > b.magnitude; });
  if (peaks.size() > count) peaks.resize(count);
  return peaks;
}

Eigen::Index spectrogram_frame_count(Eigen::Index n, Eigen::Index window_len, Eigen::Index overlap) {
  if (overlap < 0 || overlap >= window_len || window_len > n || window_len < 2)
    throw ConfigError("spectrogram framing requires 0 <= overlap < window_len <= samples (got window " +
                      std::to_string(window_len) + ", overlap " + std::to_string(overlap) +
                      ", samples " + std::to_string(n) + ")");
  return (n - window_len) / (window_len - overlap) + 1;
}

Spectrogram spectrogram(const Eigen::Ref<const Eigen::VectorXd>& samples, double sample_rate_hz,
                        Eigen::Index window_len, Eigen::Index overlap) {
  const Eigen::Index frames = spectrogram_frame_count(samples.size(), window_len, overlap);
  require_finite(samples);
  // Periodic Hann window.
  const Eigen::ArrayXd hann =
      0.5 - 0.5 * (Eigen::ArrayXd::LinSpaced(window_len, 0.0, static_cast<double>(window_len - 1)) *
                   (2.0 * std::numbers::pi / static_cast<double>(window_len)))
                      .cos();
  Spectrogram out;
  out.hop = window_len - overlap;
  out.bin_resolution_hz = sample_rate_hz / static_cast<double>(window_len);
  out.magnitudes.resize(frames, window_len / 2 + 1);
  Eigen::FFT<double> fft;
  std::vector<double> frame(static_cast<std::size_t>(window_len));
  ComplexVector freq;
  for (Eigen::Index f = 0; f < frames; ++f) {
    const auto segment = samples.segment(f * out.hop, window_len).array() * hann;
    for (Eigen::Index i = 0; i < window_len; ++i) frame[static_cast<std::size_t>(i)] = segment[i];
    fft.fwd(freq, frame);
    for (Eigen::Index k = 0; k <= window_len / 2; ++k)
      out.magnitudes(f, k) = std::abs(freq[static_cast<std::size_t>(k)]);
  }
  return out;
}

void BandSpec::validate(double nyquist_hz) const {
  if (!(low_hz >= 0.0) || !(low_hz < high_hz) || !(high_hz <= nyquist_hz))
    throw ConfigError("band [" + std::to_string(low_hz) + ", " + std::to_string(high_hz) +
                      "] Hz must satisfy 0 <= low < high <= Nyquist (" + std::to_string(nyquist_hz) +
                      " Hz)");
}

Eigen::VectorXd band_mask(Eigen::Index n, double sample_rate_hz, std::span<const BandSpec> bands,
                          double taper_hz) {
  if (taper_hz < 0.0 || !std::isfinite(taper_hz)) throw ConfigError("taper width must be >= 0");
  for (const auto& b : bands) b.validate(sample_rate_hz / 2.0);
  const bool any_pass =
      std::any_of(bands.begin(), bands.end(), [](const BandSpec& b) { return b.mode == BandMode::pass; });
  Eigen::VectorXd gain(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double f = static_cast<double>(std::min(k, n - k)) * sample_rate_hz / static_cast<double>(n);
    double g = any_pass ? 0.0 : 1.0;
    for (const auto& b : bands)
      if (b.mode == BandMode::pass) g = std::max(g, edge_window(f, b.low_hz, b.high_hz, taper_hz));
    for (const auto& b : bands)
      if (b.mode == BandMode::notch) g *= 1.0 - edge_window(f, b.low_hz, b.high_hz, taper_hz);
    gain[k] = g;
  }
  return gain;
}

namespace {

Eigen::VectorXd apply_mask(const Eigen::Ref<const Eigen::VectorXd>& samples, const Eigen::VectorXd& mask,
                           Eigen::FFT<double>& fft) {
  std::vector<double> time(samples.data(), samples.data() + samples.size());
  ComplexVector freq;
  fft.fwd(freq, time);
  for (std::size_t k = 0; k < freq.size(); ++k) freq[k] *= mask[static_cast<Eigen::Index>(k)];
  fft.inv(time, freq);
  return Eigen::Map<const Eigen::VectorXd>(time.data(), static_cast<Eigen::Index>(time.size()));
}

}  // namespace

Eigen::VectorXd filter_samples(const Eigen::Ref<const Eigen::VectorXd>& samples, double sample_rate_hz,
                               std::span<const BandSpec> bands, double taper_hz) {
  if (samples.size() < 2) throw ConfigError("filtering needs at least two samples");
  require_finite(samples);
  const Eigen::VectorXd mask = band_mask(samples.size(), sample_rate_hz, bands, taper_hz);
  Eigen::FFT<double> fft;
  return apply_mask(samples, mask, fft);
}

TraceSet band_filter(const TraceSet& set, std::span<const BandSpec> bands, double taper_hz,
                     std::size_t threads) {
  if (set.samples_per_trace() < 2) throw ConfigError("filtering needs at least two samples per trace");
  const Eigen::VectorXd mask = band_mask(set.samples_per_trace(), set.sample_rate_hz, bands, taper_hz);
  TraceSet out = set;
  parallel_for(static_cast<std::size_t>(set.trace_count()), threads, [&](std::size_t i) {
    const auto t = static_cast<Eigen::Index>(i);
    Eigen::FFT<double> fft;
    const Eigen::VectorXd row = set.samples.row(t).transpose().cast<double>();
    out.samples.row(t) = apply_mask(row, mask, fft).transpose().cast<float>();
  });
  return out;
}

TraceSet band_filter(const TraceSet& set, const BandSpec& band, double taper_hz, std::size_t threads) {
  return band_filter(set, std::span<const BandSpec>(&band, 1), taper_hz, threads);
}

}  // namespace emsca
