#include "emsca/trace_io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "emsca/errors.hpp"

namespace emsca {
namespace {

constexpr std::array<char, 4> kMagic = {'E', 'M', 'T', 'S'};

class ByteWriter {
 public:
  explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  template <typename UInt>
  void le(UInt v) {
    for (std::size_t i = 0; i < sizeof(UInt); ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void be64(std::uint64_t v) {
    for (int i = 7; i >= 0; --i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void raw(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }

 private:
  std::vector<std::uint8_t>& out_;
};

class ByteReader {
 public:
  explicit ByteReader(const std::uint8_t* data) : p_(data) {}

  template <typename UInt>
  UInt le() {
    UInt v = 0;
    for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= static_cast<UInt>(UInt{p_[i]} << (8 * i));
    p_ += sizeof(UInt);
    return v;
  }
  std::uint64_t be64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | p_[i];
    p_ += 8;
    return v;
  }
  const std::uint8_t* take(std::size_t n) {
    const auto* at = p_;
    p_ += n;
    return at;
  }

 private:
  const std::uint8_t* p_;
};

// Reads up to n bytes, returning how many arrived.
std::size_t read_some(std::istream& in, std::uint8_t* dst, std::size_t n) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount());
}

}  // namespace

std::uint64_t write_trace_set(const TraceSet& set, std::ostream& sink) {
  set.validate();
  const auto traces = static_cast<std::uint64_t>(set.trace_count());
  const auto spt = static_cast<std::uint64_t>(set.samples_per_trace());
  if (traces > UINT32_MAX || spt > UINT32_MAX) throw DataError("trace set too large for EMTS v1");

  std::vector<std::uint8_t> header;
  header.reserve(kEmtsHeaderBytes);
  ByteWriter hw(header);
  hw.raw(kMagic.data(), kMagic.size());
  hw.le<std::uint16_t>(kEmtsVersion);
  std::uint16_t flags = 0;
  if (set.key) flags |= kFlagKey;
  if (set.has_ciphertexts()) flags |= kFlagCiphertexts;
  hw.le<std::uint16_t>(flags);
  hw.le<std::uint32_t>(static_cast<std::uint32_t>(traces));
  hw.le<std::uint32_t>(static_cast<std::uint32_t>(spt));
  hw.le<std::uint64_t>(std::bit_cast<std::uint64_t>(set.sample_rate_hz));
  const auto key_bytes = set.key ? set.key->to_bytes() : std::array<std::uint8_t, 10>{};
  hw.raw(key_bytes.data(), key_bytes.size());
  sink.write(reinterpret_cast<const char*>(header.data()), static_cast<std::streamsize>(header.size()));

  std::vector<std::uint8_t> record;
  record.reserve(16 + 4 * spt);
  for (std::uint64_t t = 0; t < traces; ++t) {
    record.clear();
    ByteWriter rw(record);
    rw.be64(set.plaintexts[t].bits);
    rw.be64(set.has_ciphertexts() ? set.ciphertexts[t].bits : 0);
    for (std::uint64_t s = 0; s < spt; ++s)
      rw.le<std::uint32_t>(std::bit_cast<std::uint32_t>(
          set.samples(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s))));
    sink.write(reinterpret_cast<const char*>(record.data()), static_cast<std::streamsize>(record.size()));
  }
  sink.flush();
  if (!sink) throw IoError("failed writing EMTS stream");
  return emts_file_size(traces, spt);
}

TraceSet read_trace_set(std::istream& source) {
  std::array<std::uint8_t, kEmtsHeaderBytes> header{};
  const std::size_t got = read_some(source, header.data(), header.size());
  if (got < kMagic.size() || std::memcmp(header.data(), kMagic.data(), kMagic.size()) != 0)
    throw FormatError("not an EMTS stream (bad magic)");
  if (got < kEmtsHeaderBytes)
    throw CorruptionError("truncated EMTS header: expected " + std::to_string(kEmtsHeaderBytes) +
                          " bytes, got " + std::to_string(got));

  ByteReader hr(header.data() + kMagic.size());
  const auto version = hr.le<std::uint16_t>();
  if (version != kEmtsVersion)
    throw UnsupportedVersionError("unsupported EMTS version " + std::to_string(version));
  const auto flags = hr.le<std::uint16_t>();
  if (flags & ~(kFlagKey | kFlagCiphertexts))
    throw FormatError("unknown EMTS flag bits 0x" + std::to_string(flags));
  const std::uint64_t traces = hr.le<std::uint32_t>();
  const std::uint64_t spt = hr.le<std::uint32_t>();
  const double rate = std::bit_cast<double>(hr.le<std::uint64_t>());
  std::array<std::uint8_t, 10> key_bytes{};
  std::memcpy(key_bytes.data(), hr.take(10), 10);

  if (traces == 0) throw DataError("EMTS stream declares zero traces");
  if (spt == 0) throw DataError("EMTS stream declares zero samples per trace");

  const std::uint64_t expected = emts_file_size(traces, spt);
  const std::uint64_t payload = expected - kEmtsHeaderBytes;
  std::vector<std::uint8_t> body(payload);
  const std::size_t body_got = read_some(source, body.data(), body.size());
  if (body_got < payload)
    throw CorruptionError("truncated EMTS stream: expected " + std::to_string(expected) +
                          " bytes, got " + std::to_string(kEmtsHeaderBytes + body_got));
  if (source.peek() != std::char_traits<char>::eof())
    throw CorruptionError("EMTS stream has trailing bytes beyond the declared " +
                          std::to_string(expected));

  TraceSet set;
  set.sample_rate_hz = rate;
  if (flags & kFlagKey) set.key = Key80::from_bytes(key_bytes);
  set.samples.resize(static_cast<Eigen::Index>(traces), static_cast<Eigen::Index>(spt));
  set.plaintexts.reserve(traces);
  if (flags & kFlagCiphertexts) set.ciphertexts.reserve(traces);

  ByteReader br(body.data());
  for (std::uint64_t t = 0; t < traces; ++t) {
    set.plaintexts.push_back({br.be64()});
    const std::uint64_t ct = br.be64();
    if (flags & kFlagCiphertexts) set.ciphertexts.push_back({ct});
    for (std::uint64_t s = 0; s < spt; ++s) {
      const float v = std::bit_cast<float>(br.le<std::uint32_t>());
      if (!std::isfinite(v))
        throw DataError("non-finite sample in trace " + std::to_string(t) + " at sample " +
                        std::to_string(s));
      set.samples(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s)) = v;
    }
  }
  if (!(rate > 0.0) || !std::isfinite(rate)) throw DataError("EMTS sample rate must be positive");
  return set;
}

std::uint64_t save_trace_set(const TraceSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return write_trace_set(set, out);
}

TraceSet load_trace_set(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return read_trace_set(in);
}

}  // namespace emsca
