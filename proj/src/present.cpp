#include "emsca/present.hpp"

#include <stdexcept>

namespace emsca {
namespace {

constexpr int permuted_position(int bit) { return bit == 63 ? 63 : (16 * bit) % 63; }

constexpr std::uint64_t permute_bits(std::uint64_t value) {
  std::uint64_t out = 0;
  for (int i = 0; i < 64; ++i) out |= ((value >> i) & 1ULL) << permuted_position(i);
  return out;
}

constexpr std::uint64_t permute_bits_inv(std::uint64_t value) {
  std::uint64_t out = 0;
  for (int i = 0; i < 64; ++i) out |= ((value >> permuted_position(i)) & 1ULL) << i;
  return out;
}

constexpr std::uint8_t sbox_byte(std::uint8_t v) {
  return static_cast<std::uint8_t>((kSbox[v >> 4] << 4) | kSbox[v & 0xF]);
}

using ByteTables = std::array<std::array<std::uint64_t, 256>, 8>;

// Byte-sliced tables: table[b][v] is the contribution of state byte b
// (counted from the least significant end) holding v.
constexpr ByteTables make_sp_tables() {
  ByteTables t{};
  for (int b = 0; b < 8; ++b)
    for (int v = 0; v < 256; ++v)
      t[b][v] = permute_bits(std::uint64_t{sbox_byte(static_cast<std::uint8_t>(v))} << (8 * b));
  return t;
}

constexpr ByteTables make_p_inv_tables() {
  ByteTables t{};
  for (int b = 0; b < 8; ++b)
    for (int v = 0; v < 256; ++v) t[b][v] = permute_bits_inv(std::uint64_t(v) << (8 * b));
  return t;
}

constexpr ByteTables make_p_tables() {
  ByteTables t{};
  for (int b = 0; b < 8; ++b)
    for (int v = 0; v < 256; ++v) t[b][v] = permute_bits(std::uint64_t(v) << (8 * b));
  return t;
}

constexpr ByteTables kSpTables = make_sp_tables();
constexpr ByteTables kPTables = make_p_tables();
constexpr ByteTables kPInvTables = make_p_inv_tables();

inline std::uint64_t apply_tables(const ByteTables& t, std::uint64_t x) {
  std::uint64_t out = 0;
  for (int b = 0; b < 8; ++b) out ^= t[b][(x >> (8 * b)) & 0xFF];
  return out;
}

inline std::uint64_t sbox_all(std::uint64_t x, const std::array<std::uint8_t, 16>& box) {
  std::uint64_t out = 0;
  for (int n = 0; n < 16; ++n) out |= std::uint64_t{box[(x >> (4 * n)) & 0xF]} << (4 * n);
  return out;
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

template <std::size_t N>
std::array<std::uint8_t, N> parse_hex_bytes(std::string_view hex, const char* what) {
  if (hex.size() != 2 * N)
    throw std::invalid_argument(std::string(what) + " must be " + std::to_string(2 * N) +
                                " hex characters, got " + std::to_string(hex.size()));
  std::array<std::uint8_t, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    const int hi = hex_digit(hex[2 * i]);
    const int lo = hex_digit(hex[2 * i + 1]);
    if (hi < 0 || lo < 0)
      throw std::invalid_argument(std::string(what) + " contains a non-hex character");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

std::string hex_bytes(const std::uint8_t* data, std::size_t n) {
  static constexpr char digits[] = "0123456789ABCDEF";
  std::string s;
  s.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    s.push_back(digits[data[i] >> 4]);
    s.push_back(digits[data[i] & 0xF]);
  }
  return s;
}

}  // namespace

Block64 sbox_layer(Block64 state) { return {sbox_all(state.bits, kSbox)}; }
Block64 sbox_layer_inv(Block64 state) { return {sbox_all(state.bits, kSboxInv)}; }

Block64 p_layer(Block64 state) { return {apply_tables(kPTables, state.bits)}; }
Block64 p_layer_inv(Block64 state) { return {apply_tables(kPInvTables, state.bits)}; }

RoundKeySchedule key_schedule(const Key80& key) {
  RoundKeySchedule rk{};
  std::uint64_t hi = key.high;  // k79..k16
  std::uint64_t lo = key.low;   // k15..k0
  rk[0] = hi;
  for (int counter = 1; counter < kRoundKeys; ++counter) {
    // Rotate the 80-bit register left by 61 (equivalently right by 19).
    const std::uint64_t new_hi = (hi >> 19) | (lo << 45) | ((hi & 0x7) << 61);
    const std::uint64_t new_lo = (hi >> 3) & 0xFFFF;
    hi = new_hi;
    lo = new_lo;
    hi = (hi & 0x0FFFFFFFFFFFFFFFULL) | (std::uint64_t{kSbox[hi >> 60]} << 60);
    // Counter occupies k19..k15: bits 3..0 of hi and bit 15 of lo.
    hi ^= static_cast<std::uint64_t>(counter) >> 1;
    lo ^= static_cast<std::uint64_t>(counter & 1) << 15;
    rk[counter] = hi;
  }
  return rk;
}

Block64 encrypt(Block64 plaintext, const Key80& key) {
  const RoundKeySchedule rk = key_schedule(key);
  std::uint64_t state = plaintext.bits;
  for (int r = 0; r < kRounds; ++r) state = apply_tables(kSpTables, state ^ rk[r]);
  return {state ^ rk[kRounds]};
}

Block64 decrypt(Block64 ciphertext, const Key80& key) {
  const RoundKeySchedule rk = key_schedule(key);
  std::uint64_t state = ciphertext.bits ^ rk[kRounds];
  for (int r = kRounds - 1; r >= 0; --r)
    state = sbox_all(apply_tables(kPInvTables, state), kSboxInv) ^ rk[r];
  return {state};
}

Block64 round1_sbox_state(Block64 plaintext, const Key80& key) {
  return sbox_layer({plaintext.bits ^ key.high});
}

std::string to_hex(Block64 block) {
  std::array<std::uint8_t, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[i] = block.byte(i + 1);
  return hex_bytes(bytes.data(), bytes.size());
}

std::string to_hex(const Key80& key) {
  const auto bytes = key.to_bytes();
  return hex_bytes(bytes.data(), bytes.size());
}

Block64 parse_block_hex(std::string_view hex) {
  const auto bytes = parse_hex_bytes<8>(hex, "block");
  Block64 b;
  for (auto v : bytes) b.bits = (b.bits << 8) | v;
  return b;
}

Key80 parse_key_hex(std::string_view hex) {
  return Key80::from_bytes(parse_hex_bytes<10>(hex, "key"));
}

}  // namespace emsca
