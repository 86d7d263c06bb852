#include "emsca/bfa.hpp"

#include <atomic>

#include "emsca/parallel.hpp"

namespace emsca {

BfaResult complete_key(const PartialKey& partial, const KnownPair& pair, const std::optional<KnownPair>& verify,
                       std::size_t threads) {
  constexpr std::size_t kChunks = 64;
  constexpr std::uint32_t kChunkSize = kResidualKeySpace / kChunks;
  std::vector<std::vector<Key80>> found(kChunks);
  std::atomic<std::uint32_t> trials{0};

  parallel_for(kChunks, threads, [&](std::size_t chunk) {
    const std::uint32_t begin = static_cast<std::uint32_t>(chunk) * kChunkSize;
    for (std::uint32_t low = begin; low < begin + kChunkSize; ++low) {
      const Key80 key{partial.known_high, static_cast<std::uint16_t>(low)};
      if (encrypt(pair.plaintext, key) != pair.ciphertext) continue;
      if (verify && encrypt(verify->plaintext, key) != verify->ciphertext) continue;
      found[chunk].push_back(key);
    }
    trials += kChunkSize;
  });

  BfaResult result;
  result.trials = trials.load();
  for (auto& chunk : found) result.matches.insert(result.matches.end(), chunk.begin(), chunk.end());
  if (!result.matches.empty()) {
    result.key = result.matches.front();
    result.status = result.matches.size() == 1 ? BfaStatus::found : BfaStatus::ambiguous;
  }
  return result;
}

}  // namespace emsca
