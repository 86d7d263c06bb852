// Synthetic EM traces under the Hamming-weight emission model.
//
// Each encrypting trace is
//   baseline * activity_gain
//   + sum_j gain * HW(I_j) * pulse_j(s)
//   + sum_k A_k * sin(2 pi f_k s / rate + phase_k)
//   + N(0, noise_sigma^2)
// where I_j is byte j of the round-1 S-box state and pulse_j is a rectangular
// window of leak_width samples starting at first_leak_offset + (j-1)*leak_spacing.
// Interferer phases are drawn per trace: the RF environment is not locked
// to the encryption trigger.
#ifndef EMSCA_SYNTH_HPP
#define EMSCA_SYNTH_HPP

#include <cstdint>
#include <vector>

#include "emsca/random.hpp"
#include "emsca/trace.hpp"

namespace emsca {

struct Interferer {
  double frequency_hz = 0.0;
  double amplitude = 0.0;
};

/// Narrowband components observed around the encrypting device:
/// 11.25, 22.5, 45.08, 56.33, 78.83, 90.08 and 112.66 MHz.
std::vector<Interferer> observed_interferers(double amplitude);

struct SynthConfig {
  double gain = 1.0;
  double noise_sigma = 1.0;
  double baseline = 2.0;
  double activity_gain = 2.0;
  double sample_rate_hz = 2.5e9;
  std::size_t samples_per_trace = 4096;
  std::size_t first_leak_offset = 512;
  std::size_t leak_spacing = 256;
  std::size_t leak_width = 16;
  std::vector<Interferer> interferers;
  std::uint64_t seed = 0;
  std::size_t threads = 0;

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;

  /// First sample of the leakage window for key byte `position` (1..8).
  std::size_t leak_window_start(int position) const {
    return first_leak_offset + static_cast<std::size_t>(position - 1) * leak_spacing;
  }
};

/// One encrypting trace; consumes draws from `rng` (interferer phases, then noise).
Trace synthesize_trace(Block64 plaintext, const Key80& key, const SynthConfig& cfg, RandomStream& rng);

/// Trace i uses stream derive(cfg.seed, i): its plaintext is the first draw.
/// Output is independent of cfg.threads.
TraceSet synthesize_set(std::size_t n_traces, const Key80& key, const SynthConfig& cfg);

/// Non-encrypting reference traces: activity gain 1, no leakage pulses, zero
/// plaintexts, no key or ciphertexts.
TraceSet synthesize_idle_set(std::size_t n_traces, const SynthConfig& cfg);

}  // namespace emsca

#endif  // EMSCA_SYNTH_HPP
