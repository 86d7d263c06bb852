// Brute-force completion of the 16 key bits (k15..k0) that the round-1
// correlation attack cannot reach.
#ifndef EMSCA_BFA_HPP
#define EMSCA_BFA_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "emsca/present.hpp"

namespace emsca {

inline constexpr std::uint32_t kResidualKeySpace = 1u << 16;

struct PartialKey {
  std::uint64_t known_high = 0;  // k79..k16, e.g. AttackReport::recovered_high()
};

struct KnownPair {
  Block64 plaintext;
  Block64 ciphertext;
};

enum class BfaStatus { found, not_found, ambiguous };

struct BfaResult {
  BfaStatus status = BfaStatus::not_found;
  std::optional<Key80> key;      // first match in candidate order
  std::vector<Key80> matches;    // every match, ascending low bits
  std::uint32_t trials = 0;      // candidates tested, never above 65536
};

/// Tries k15..k0 = 0x0000..0xFFFF. A second pair, when given, must also
/// match. Output is independent of `threads`.
BfaResult complete_key(const PartialKey& partial, const KnownPair& pair,
                       const std::optional<KnownPair>& verify = std::nullopt, std::size_t threads = 0);

}  // namespace emsca

#endif  // EMSCA_BFA_HPP
