// EMTS v1 trace-set files.
//
// Little-endian throughout. 34-byte header:
//   magic "EMTS" | version u16 (=1) | flags u16 | trace_count u32 |
//   samples_per_trace u32 | sample_rate_hz f64 | key 10 bytes
// flags: bit0 key present, bit1 ciphertexts present. Absent fields are
// zero-filled. Each record: plaintext 8 bytes | ciphertext 8 bytes |
// samples as IEEE-754 binary32. Blocks and keys are stored big-endian
// (most significant byte first), matching their hex form.
#ifndef EMSCA_TRACE_IO_HPP
#define EMSCA_TRACE_IO_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "emsca/trace.hpp"

namespace emsca {

inline constexpr std::uint16_t kEmtsVersion = 1;
inline constexpr std::size_t kEmtsHeaderBytes = 34;
inline constexpr std::uint16_t kFlagKey = 0x1;
inline constexpr std::uint16_t kFlagCiphertexts = 0x2;

/// 34 + traces * (16 + 4 * samples_per_trace).
constexpr std::uint64_t emts_file_size(std::uint64_t traces, std::uint64_t samples_per_trace) {
  return kEmtsHeaderBytes + traces * (16 + 4 * samples_per_trace);
}

/// Returns the number of bytes written. Validates the set first (DataError);
/// a failing sink raises IoError.
std::uint64_t write_trace_set(const TraceSet& set, std::ostream& sink);

/// Throws FormatError (bad magic, unknown flags), UnsupportedVersionError,
/// CorruptionError (truncated or trailing bytes) or DataError (non-finite
/// sample, invalid sample rate).
TraceSet read_trace_set(std::istream& source);

std::uint64_t save_trace_set(const TraceSet& set, const std::filesystem::path& path);
TraceSet load_trace_set(const std::filesystem::path& path);

}  // namespace emsca

#endif  // EMSCA_TRACE_IO_HPP
