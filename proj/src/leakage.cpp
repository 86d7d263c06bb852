#include "emsca/leakage.hpp"

#include <stdexcept>
#include <string>

namespace emsca {

KeyBytePosition::KeyBytePosition(int position) : position_(position) {
  if (position < 1 || position > kRecoverableBytes)
    throw std::out_of_range("key byte position " + std::to_string(position) +
                            " does not enter the round-1 S-box layer (valid: 1..8)");
}

const Eigen::Matrix<std::uint8_t, 256, 256>& hw_table() {
  static const auto table = [] {
    Eigen::Matrix<std::uint8_t, 256, 256> t;
    for (int p = 0; p < 256; ++p)
      for (int c = 0; c < 256; ++c)
        t(p, c) = static_cast<std::uint8_t>(hamming_weight(
            predict_intermediate(static_cast<std::uint8_t>(p), static_cast<std::uint8_t>(c))));
    return t;
  }();
  return table;
}

HypothesisMatrix hypothesis_matrix(std::span<const Block64> plaintexts, KeyBytePosition position) {
  if (plaintexts.empty()) throw std::invalid_argument("hypothesis matrix needs at least one plaintext");
  const auto& table = hw_table();
  HypothesisMatrix h{position, HypothesisValues(kCandidates, static_cast<Eigen::Index>(plaintexts.size()))};
  for (std::size_t t = 0; t < plaintexts.size(); ++t)
    h.values.col(static_cast<Eigen::Index>(t)) = table.row(plaintexts[t].byte(position.value())).transpose();
  return h;
}

HypothesisMatrix hypothesis_matrix(std::span<const Block64> plaintexts, int byte_index) {
  return hypothesis_matrix(plaintexts, KeyBytePosition(byte_index));
}

}  // namespace emsca
