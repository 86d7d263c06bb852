// JSON and CSV encodings of analysis results.
//
// JSON documents carry a "schema" tag ("emsca.attack/1", "emsca.sr/1",
// "emsca.sema/1", "emsca.spectrum/1", "emsca.spectrogram/1", "emsca.bfa/1",
// "emsca.gen/1"). Byte values and keys are upper-case hex strings; an
// unbounded margin is written as null.
#ifndef EMSCA_REPORT_HPP
#define EMSCA_REPORT_HPP

#include <json.hpp>

#include <iosfwd>
#include <optional>

#include "emsca/bfa.hpp"
#include "emsca/cema.hpp"
#include "emsca/dsp.hpp"
#include "emsca/sema.hpp"
#include "emsca/synth.hpp"

namespace emsca {

/// `top` limits each ranking; `truth` adds per-byte correctness.
nlohmann::json to_json(const AttackReport& report, std::size_t top = 5,
                       const std::optional<Key80>& truth = std::nullopt);
nlohmann::json to_json(const SrReport& report);
nlohmann::json to_json(const SemaReport& report);
nlohmann::json to_json(const Spectrum& spectrum, std::size_t peaks = 10);
nlohmann::json to_json(const Spectrogram& spectrogram);
nlohmann::json to_json(const BfaResult& result);
nlohmann::json to_json(const SynthConfig& cfg);

/// Inverse of to_json for attack reports; rankings hold only the exported
/// top entries. Throws FormatError on schema mismatch.
AttackReport attack_report_from_json(const nlohmann::json& doc);
SrReport sr_report_from_json(const nlohmann::json& doc);

std::string byte_hex(std::uint8_t value);
std::string key_pattern_name(KeyPattern pattern);
/// Accepts 00, 55, aa, ff (any case, optional 0x prefix). Throws std::invalid_argument.
KeyPattern parse_key_pattern(std::string_view text);

// CSV writers, each with a header row.
void write_csv(std::ostream& out, const AttackReport& report, std::size_t top = 5);  // byte,rank,candidate,abs_rho,sample
void write_csv(std::ostream& out, const SrReport& report);                          // byte,successes,runs,success_rate
void write_csv(std::ostream& out, const Spectrum& spectrum);                        // bin_hz,magnitude
void write_csv(std::ostream& out, const Spectrogram& spectrogram);                  // frame,bin_hz,magnitude
void write_csv(std::ostream& out, const SemaReport& report);                        // set,trace,rms
void write_csv(std::ostream& out, const CorrelationSurface& surface);               // candidate,sample,rho

}  // namespace emsca

#endif  // EMSCA_REPORT_HPP
