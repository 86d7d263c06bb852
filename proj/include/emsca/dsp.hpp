// Frequency-domain analysis: magnitude spectra, Hann-windowed spectrograms
// and brick-wall (optionally raised-cosine tapered) FFT band filtering.
#ifndef EMSCA_DSP_HPP
#define EMSCA_DSP_HPP

#include <Eigen/Core>

#include <span>
#include <vector>

#include "emsca/trace.hpp"

namespace emsca {

/// One-sided magnitude spectrum |X_k| for k = 0..n/2 (unnormalised DFT).
struct Spectrum {
  Eigen::VectorXd magnitudes;
  double bin_resolution_hz = 0.0;

  double bin_frequency(Eigen::Index k) const { return static_cast<double>(k) * bin_resolution_hz; }
};

/// Throws ConfigError for fewer than two samples, DataError for non-finite input.
Spectrum fft_magnitude(const Eigen::Ref<const Eigen::VectorXd>& samples, double sample_rate_hz);
Spectrum fft_magnitude(const Trace& trace, double sample_rate_hz);

/// Per-bin mean of the magnitude spectra of every trace in the set.
Spectrum mean_spectrum(const TraceSet& set);

/// Sum of squares recovered from a one-sided spectrum of an n-sample signal
/// (Parseval with the DFT's 1/n factor).
double spectral_energy(const Spectrum& spectrum, Eigen::Index n);

struct SpectralPeak {
  Eigen::Index bin = 0;
  double frequency_hz = 0.0;
  double magnitude = 0.0;
};

/// The `count` largest local maxima, excluding DC, strongest first.
std::vector<SpectralPeak> spectral_peaks(const Spectrum& spectrum, std::size_t count);

struct Spectrogram {
  Eigen::MatrixXd magnitudes;  // frames x (window_len/2 + 1)
  double bin_resolution_hz = 0.0;
  Eigen::Index hop = 0;
};

/// floor((n - window_len) / (window_len - overlap)) + 1 frames.
/// Throws ConfigError unless 0 <= overlap < window_len <= n.
Eigen::Index spectrogram_frame_count(Eigen::Index n, Eigen::Index window_len, Eigen::Index overlap);

Spectrogram spectrogram(const Eigen::Ref<const Eigen::VectorXd>& samples, double sample_rate_hz,
                        Eigen::Index window_len, Eigen::Index overlap);

enum class BandMode { pass, notch };

struct BandSpec {
  double low_hz = 0.0;
  double high_hz = 0.0;
  BandMode mode = BandMode::pass;

  /// Throws ConfigError unless 0 <= low < high <= nyquist.
  void validate(double nyquist_hz) const;
};

/// Per-bin gain over the full n-point DFT. Pass bands combine by union
/// (no pass band means everything passes); notches are then cut out.
/// A positive taper adds a raised-cosine skirt of that width outside each edge.
Eigen::VectorXd band_mask(Eigen::Index n, double sample_rate_hz, std::span<const BandSpec> bands,
                          double taper_hz = 0.0);

Eigen::VectorXd filter_samples(const Eigen::Ref<const Eigen::VectorXd>& samples, double sample_rate_hz,
                               std::span<const BandSpec> bands, double taper_hz = 0.0);

/// Filters every trace; metadata passes through unchanged.
TraceSet band_filter(const TraceSet& set, std::span<const BandSpec> bands, double taper_hz = 0.0,
                     std::size_t threads = 0);
TraceSet band_filter(const TraceSet& set, const BandSpec& band, double taper_hz = 0.0,
                     std::size_t threads = 0);

}  // namespace emsca

#endif  // EMSCA_DSP_HPP
