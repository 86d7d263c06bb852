// Straight-line PRESENT-80 reference written against the cipher's design
// document, one bit per array element. Shares no code with the library.
#ifndef EMSCA_TESTS_PRESENT_ORACLE_HPP
#define EMSCA_TESTS_PRESENT_ORACLE_HPP

#include <array>
#include <cstdint>

namespace oracle {

using Bits64 = std::array<int, 64>;  // index i = bit i, bit 0 least significant
using Bits80 = std::array<int, 80>;

inline constexpr int kS[16] = {12, 5, 6, 11, 9, 0, 10, 13, 3, 14, 15, 8, 4, 7, 1, 2};

inline Bits64 to_bits(std::uint64_t v) {
  Bits64 b{};
  for (int i = 0; i < 64; ++i) b[i] = static_cast<int>((v >> i) & 1);
  return b;
}

inline std::uint64_t from_bits(const Bits64& b) {
  std::uint64_t v = 0;
  for (int i = 63; i >= 0; --i) v = (v << 1) | static_cast<std::uint64_t>(b[i]);
  return v;
}

inline Bits64 add_round_key(const Bits64& state, const Bits80& key) {
  Bits64 out{};
  for (int i = 0; i < 64; ++i) out[i] = state[i] ^ key[i + 16];  // K_i = k79..k16
  return out;
}

inline Bits64 sbox_layer(const Bits64& state) {
  Bits64 out{};
  for (int n = 0; n < 16; ++n) {
    int x = 0;
    for (int b = 3; b >= 0; --b) x = 2 * x + state[4 * n + b];
    const int y = kS[x];
    for (int b = 0; b < 4; ++b) out[4 * n + b] = (y >> b) & 1;
  }
  return out;
}

inline Bits64 p_layer(const Bits64& state) {
  Bits64 out{};
  for (int i = 0; i < 64; ++i) {
    const int target = i == 63 ? 63 : (i * 16) % 63;
    out[target] = state[i];
  }
  return out;
}

inline Bits80 update_key(const Bits80& key, int round_counter) {
  Bits80 rotated{};
  // [k79 k78 ... k0] = [k18 k17 ... k0 k79 ... k19]
  for (int i = 0; i < 80; ++i) rotated[(i + 61) % 80] = key[i];
  int x = 0;
  for (int b = 79; b >= 76; --b) x = 2 * x + rotated[b];
  const int y = kS[x];
  for (int b = 0; b < 4; ++b) rotated[76 + b] = (y >> b) & 1;
  for (int b = 0; b < 5; ++b) rotated[15 + b] ^= (round_counter >> b) & 1;
  return rotated;
}

/// key_high = k79..k16, key_low = k15..k0.
inline std::uint64_t encrypt(std::uint64_t plaintext, std::uint64_t key_high, std::uint16_t key_low) {
  Bits80 key{};
  for (int i = 0; i < 16; ++i) key[i] = (key_low >> i) & 1;
  for (int i = 0; i < 64; ++i) key[16 + i] = static_cast<int>((key_high >> i) & 1);
  Bits64 state = to_bits(plaintext);
  for (int round = 1; round <= 31; ++round) {
    state = add_round_key(state, key);
    state = sbox_layer(state);
    state = p_layer(state);
    key = update_key(key, round);
  }
  return from_bits(add_round_key(state, key));
}

/// Round keys K1..K32 as the leftmost 64 register bits.
inline std::array<std::uint64_t, 32> round_keys(std::uint64_t key_high, std::uint16_t key_low) {
  Bits80 key{};
  for (int i = 0; i < 16; ++i) key[i] = (key_low >> i) & 1;
  for (int i = 0; i < 64; ++i) key[16 + i] = static_cast<int>((key_high >> i) & 1);
  std::array<std::uint64_t, 32> out{};
  for (int r = 0; r < 32; ++r) {
    std::uint64_t k = 0;
    for (int i = 79; i >= 16; --i) k = (k << 1) | static_cast<std::uint64_t>(key[i]);
    out[r] = k;
    if (r < 31) key = update_key(key, r + 1);
  }
  return out;
}

/// Nibble-by-nibble S(pt ^ K1).
inline std::uint64_t round1_sbox(std::uint64_t plaintext, std::uint64_t key_high) {
  std::uint64_t out = 0;
  for (int n = 15; n >= 0; --n) {
    const int x = static_cast<int>(((plaintext ^ key_high) >> (4 * n)) & 0xF);
    out = (out << 4) | static_cast<std::uint64_t>(kS[x]);
  }
  return out;
}

}  // namespace oracle

#endif  // EMSCA_TESTS_PRESENT_ORACLE_HPP
