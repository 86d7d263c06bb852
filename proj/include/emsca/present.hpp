// PRESENT-80 block cipher: bit-exact encryption, decryption and key schedule,
// plus the round-1 S-box intermediate that the correlation attack targets.
//
// Bit numbering follows the cipher's design document: bit 63 of a block and
// bit k79 of a key are the leftmost (most significant) bits.
#ifndef EMSCA_PRESENT_HPP
#define EMSCA_PRESENT_HPP

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace emsca {

struct Block64 {
  std::uint64_t bits = 0;

  /// Byte `position` in 1..8, byte 1 being bits 63..56.
  constexpr std::uint8_t byte(int position) const {
    return static_cast<std::uint8_t>(bits >> (64 - 8 * position));
  }

  friend constexpr bool operator==(Block64, Block64) = default;
};

/// 80-bit key register k79..k0. `high` holds k79..k16, `low` holds k15..k0.
struct Key80 {
  std::uint64_t high = 0;
  std::uint16_t low = 0;

  /// Byte `position` in 1..10, byte 1 being k79..k72.
  constexpr std::uint8_t byte(int position) const {
    return position <= 8 ? static_cast<std::uint8_t>(high >> (64 - 8 * position))
                         : static_cast<std::uint8_t>(low >> (80 - 8 * position));
  }

  static constexpr Key80 from_bytes(const std::array<std::uint8_t, 10>& bytes) {
    Key80 k;
    for (int i = 0; i < 8; ++i) k.high = (k.high << 8) | bytes[i];
    k.low = static_cast<std::uint16_t>((bytes[8] << 8) | bytes[9]);
    return k;
  }

  constexpr std::array<std::uint8_t, 10> to_bytes() const {
    std::array<std::uint8_t, 10> out{};
    for (int i = 0; i < 10; ++i) out[i] = byte(i + 1);
    return out;
  }

  friend constexpr bool operator==(const Key80&, const Key80&) = default;
};

inline constexpr int kRounds = 31;
inline constexpr int kRoundKeys = 32;

/// Round keys K1..K32. K1 is always the leftmost 64 bits of the master key.
using RoundKeySchedule = std::array<std::uint64_t, kRoundKeys>;

inline constexpr std::array<std::uint8_t, 16> kSbox = {
    0xC, 0x5, 0x6, 0xB, 0x9, 0x0, 0xA, 0xD, 0x3, 0xE, 0xF, 0x8, 0x4, 0x7, 0x1, 0x2};

inline constexpr std::array<std::uint8_t, 16> kSboxInv = [] {
  std::array<std::uint8_t, 16> inv{};
  for (std::uint8_t x = 0; x < 16; ++x) inv[kSbox[x]] = x;
  return inv;
}();

constexpr std::uint8_t sbox(std::uint8_t nibble) { return kSbox[nibble & 0xF]; }
constexpr std::uint8_t sbox_inv(std::uint8_t nibble) { return kSboxInv[nibble & 0xF]; }

/// Applies the S-box to all sixteen nibbles.
Block64 sbox_layer(Block64 state);
Block64 sbox_layer_inv(Block64 state);

/// Bit i moves to position 16*i mod 63; bit 63 stays.
Block64 p_layer(Block64 state);
Block64 p_layer_inv(Block64 state);

RoundKeySchedule key_schedule(const Key80& key);

Block64 encrypt(Block64 plaintext, const Key80& key);
Block64 decrypt(Block64 ciphertext, const Key80& key);

/// Round-1 state right after the S-box layer: S(plaintext XOR K1).
Block64 round1_sbox_state(Block64 plaintext, const Key80& key);

// Hex encodings, most significant first. Parsing throws std::invalid_argument.
std::string to_hex(Block64 block);
std::string to_hex(const Key80& key);
Block64 parse_block_hex(std::string_view hex);
Key80 parse_key_hex(std::string_view hex);

}  // namespace emsca

#endif  // EMSCA_PRESENT_HPP
