// Hamming-weight leakage model: E = g * HW(I) + n, with I the round-1
// S-box output byte for a guessed key byte.
#ifndef EMSCA_LEAKAGE_HPP
#define EMSCA_LEAKAGE_HPP

#include <Eigen/Core>

#include <bit>
#include <cstdint>
#include <span>

#include "emsca/present.hpp"

namespace emsca {

inline constexpr int kCandidates = 256;
inline constexpr int kRecoverableBytes = 8;

/// Position of a key byte that enters the round-1 S-box layer (1..8).
/// Key bytes 9 and 10 sit outside K1 and cannot be represented.
class KeyBytePosition {
 public:
  /// Throws std::out_of_range unless 1 <= position <= 8.
  explicit KeyBytePosition(int position);
  constexpr int value() const { return position_; }

 private:
  int position_;
};

constexpr int hamming_weight(std::uint64_t value) { return std::popcount(value); }

/// Counts set bits among the low `width` bits (1..64).
constexpr int hamming_weight(std::uint64_t value, int width) {
  return std::popcount(width >= 64 ? value : value & ((std::uint64_t{1} << width) - 1));
}

/// S-box applied to both nibbles of (plaintext_byte XOR candidate).
constexpr std::uint8_t predict_intermediate(std::uint8_t plaintext_byte, std::uint8_t candidate) {
  const std::uint8_t x = plaintext_byte ^ candidate;
  return static_cast<std::uint8_t>((sbox(x >> 4) << 4) | sbox(x & 0xF));
}

constexpr double leakage_energy(std::uint8_t intermediate, double gain, double noise) {
  return gain * hamming_weight(intermediate) + noise;
}

using HypothesisValues = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Predicted Hamming weights, 256 candidates (rows) by N traces (columns).
struct HypothesisMatrix {
  KeyBytePosition position;
  HypothesisValues values;

  Eigen::Index traces() const { return values.cols(); }
};

/// Throws std::invalid_argument on an empty plaintext list.
HypothesisMatrix hypothesis_matrix(std::span<const Block64> plaintexts, KeyBytePosition position);

/// Convenience overload; throws std::out_of_range for positions outside 1..8.
HypothesisMatrix hypothesis_matrix(std::span<const Block64> plaintexts, int byte_index);

/// hw_table(p, c) = HW(predict_intermediate(p, c)) for all byte pairs.
const Eigen::Matrix<std::uint8_t, 256, 256>& hw_table();

}  // namespace emsca

#endif  // EMSCA_LEAKAGE_HPP
