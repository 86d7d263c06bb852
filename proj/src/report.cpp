#include "emsca/report.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "emsca/errors.hpp"
#include "emsca/random.hpp"

namespace emsca {
namespace {

using nlohmann::json;

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void expect_schema(const json& doc, const char* schema) {
  if (!doc.is_object() || doc.value("schema", "") != schema)
    throw FormatError(std::string("expected a document with schema ") + schema);
}

std::uint8_t parse_byte_hex(const std::string& s) {
  if (s.size() != 2) throw FormatError("expected a two-digit hex byte, got '" + s + "'");
  return static_cast<std::uint8_t>(std::stoul(s, nullptr, 16));
}

}  // namespace

std::string byte_hex(std::uint8_t value) {
  static constexpr char digits[] = "0123456789ABCDEF";
  return {digits[value >> 4], digits[value & 0xF]};
}

std::string key_pattern_name(KeyPattern pattern) {
  switch (pattern) {
    case KeyPattern::zeros: return "00000000b";
    case KeyPattern::alternating: return "01010101b";
    case KeyPattern::inverted: return "10101010b";
    case KeyPattern::ones: return "11111111b";
  }
  return "unknown";
}

KeyPattern parse_key_pattern(std::string_view text) {
  std::string s(text);
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) s = s.substr(2);
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (KeyPattern p : kKeyPatterns) {
    std::string hex = byte_hex(static_cast<std::uint8_t>(p));
    for (auto& c : hex) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == hex || s == key_pattern_name(p)) return p;
  }
  throw std::invalid_argument("key pattern must be one of 00, 55, aa, ff");
}

json to_json(const AttackReport& report, std::size_t top, const std::optional<Key80>& truth) {
  json bytes = json::array();
  for (const auto& b : report.bytes) {
    json ranking = json::array();
    for (std::size_t r = 0; r < std::min(top, b.ranking.size()); ++r)
      ranking.push_back({{"candidate", byte_hex(b.ranking[r].candidate)},
                         {"abs_rho", b.ranking[r].abs_rho},
                         {"sample", b.ranking[r].sample}});
    json entry = {{"byte", b.position.value()},
                  {"recovered", byte_hex(b.recovered)},
                  {"peak_abs_rho", b.ranking.front().abs_rho},
                  {"sample", b.ranking.front().sample},
                  {"margin", finite_or_null(b.margin)},
                  {"confident", b.confident},
                  {"ranking", std::move(ranking)}};
    if (truth) {
      const std::uint8_t expected = truth->byte(b.position.value());
      entry["expected"] = byte_hex(expected);
      entry["correct"] = expected == b.recovered;
      for (std::size_t r = 0; r < b.ranking.size(); ++r)
        if (b.ranking[r].candidate == expected) entry["true_rank"] = r + 1;
    }
    bytes.push_back(std::move(entry));
  }
  std::string high;
  for (auto v : report.recovered_bytes) high += byte_hex(v);
  json doc = {{"schema", "emsca.attack/1"},
              {"traces_used", report.traces_used},
              {"samples", report.samples},
              {"threshold", report.threshold},
              {"all_confident", report.all_confident()},
              {"recovered_high", high},
              {"unrecoverable_bytes", json::array({9, 10})},
              {"bytes", std::move(bytes)}};
  if (truth) {
    int correct = 0;
    for (const auto& b : doc["bytes"]) correct += b["correct"].get<bool>() ? 1 : 0;
    doc["correct_bytes"] = correct;
  }
  return doc;
}

AttackReport attack_report_from_json(const json& doc) {
  expect_schema(doc, "emsca.attack/1");
  AttackReport report;
  report.traces_used = doc.at("traces_used").get<std::size_t>();
  report.samples = doc.at("samples").get<std::size_t>();
  report.threshold = doc.at("threshold").get<double>();
  for (const auto& entry : doc.at("bytes")) {
    ByteAttack b{KeyBytePosition(entry.at("byte").get<int>()), {}, parse_byte_hex(entry.at("recovered")), 0.0,
                 entry.at("confident").get<bool>()};
    b.margin = entry.at("margin").is_null() ? std::numeric_limits<double>::infinity()
                                            : entry.at("margin").get<double>();
    for (const auto& r : entry.at("ranking"))
      b.ranking.push_back({parse_byte_hex(r.at("candidate")), r.at("abs_rho").get<double>(),
                           r.at("sample").get<Eigen::Index>()});
    report.recovered_bytes[static_cast<std::size_t>(b.position.value() - 1)] = b.recovered;
    report.bytes.push_back(std::move(b));
  }
  return report;
}

json to_json(const SrReport& report) {
  json bytes = json::array();
  for (std::size_t j = 0; j < kRecoverableBytes; ++j)
    bytes.push_back({{"byte", j + 1}, {"successes", report.successes[j]}, {"success_rate", report.success_rate[j]}});
  return {{"schema", "emsca.sr/1"},
          {"pattern", byte_hex(static_cast<std::uint8_t>(report.pattern))},
          {"pattern_bits", key_pattern_name(report.pattern)},
          {"runs", report.runs},
          {"traces_per_run", report.traces_per_run},
          {"bytes", std::move(bytes)}};
}

SrReport sr_report_from_json(const json& doc) {
  expect_schema(doc, "emsca.sr/1");
  SrReport r;
  r.pattern = parse_key_pattern(doc.at("pattern").get<std::string>());
  r.runs = doc.at("runs").get<std::size_t>();
  r.traces_per_run = doc.at("traces_per_run").get<std::size_t>();
  for (const auto& b : doc.at("bytes")) {
    const auto j = b.at("byte").get<std::size_t>() - 1;
    if (j >= kRecoverableBytes) throw FormatError("SR byte index out of range");
    r.successes[j] = b.at("successes").get<std::size_t>();
    r.success_rate[j] = b.at("success_rate").get<double>();
  }
  return r;
}

json to_json(const SemaReport& report) {
  return {{"schema", "emsca.sema/1"},
          {"rms_active", report.rms_active},
          {"rms_idle", report.rms_idle},
          {"peak_active", report.peak_active},
          {"peak_idle", report.peak_idle},
          {"ratio_rms", report.ratio_rms},
          {"traces_active", report.per_trace_rms_active.size()},
          {"traces_idle", report.per_trace_rms_idle.size()}};
}

json to_json(const Spectrum& spectrum, std::size_t peaks) {
  json top = json::array();
  for (const auto& p : spectral_peaks(spectrum, peaks))
    top.push_back({{"bin", p.bin}, {"frequency_hz", p.frequency_hz}, {"magnitude", p.magnitude}});
  return {{"schema", "emsca.spectrum/1"},
          {"bin_resolution_hz", spectrum.bin_resolution_hz},
          {"magnitudes", std::vector<double>(spectrum.magnitudes.begin(), spectrum.magnitudes.end())},
          {"peaks", std::move(top)}};
}

json to_json(const Spectrogram& spectrogram) {
  json frames = json::array();
  for (Eigen::Index f = 0; f < spectrogram.magnitudes.rows(); ++f) {
    const Eigen::VectorXd row = spectrogram.magnitudes.row(f).transpose();
    frames.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return {{"schema", "emsca.spectrogram/1"},
          {"bin_resolution_hz", spectrogram.bin_resolution_hz},
          {"hop", spectrogram.hop},
          {"frames", std::move(frames)}};
}

json to_json(const BfaResult& result) {
  const char* status = result.status == BfaStatus::found       ? "found"
                       : result.status == BfaStatus::ambiguous ? "ambiguous"
                                                               : "not_found";
  json matches = json::array();
  for (const auto& k : result.matches) matches.push_back(to_hex(k));
  return {{"schema", "emsca.bfa/1"},
          {"status", status},
          {"key", result.key ? json(to_hex(*result.key)) : json(nullptr)},
          {"matches", std::move(matches)},
          {"trials", result.trials}};
}

json to_json(const SynthConfig& cfg) {
  json tones = json::array();
  for (const auto& t : cfg.interferers) tones.push_back({{"frequency_hz", t.frequency_hz}, {"amplitude", t.amplitude}});
  return {{"gain", cfg.gain},
          {"noise_sigma", cfg.noise_sigma},
          {"baseline", cfg.baseline},
          {"activity_gain", cfg.activity_gain},
          {"sample_rate_hz", cfg.sample_rate_hz},
          {"samples_per_trace", cfg.samples_per_trace},
          {"first_leak_offset", cfg.first_leak_offset},
          {"leak_spacing", cfg.leak_spacing},
          {"leak_width", cfg.leak_width},
          {"interferers", std::move(tones)},
          {"seed", cfg.seed},
          {"rng", kRngAlgorithm}};
}

void write_csv(std::ostream& out, const AttackReport& report, std::size_t top) {
  out << "byte,rank,candidate,abs_rho,sample\n";
  for (const auto& b : report.bytes)
    for (std::size_t r = 0; r < std::min(top, b.ranking.size()); ++r)
      out << b.position.value() << ',' << r + 1 << ',' << byte_hex(b.ranking[r].candidate) << ','
          << b.ranking[r].abs_rho << ',' << b.ranking[r].sample << '\n';
}

void write_csv(std::ostream& out, const SrReport& report) {
  out << "byte,successes,runs,success_rate\n";
  for (std::size_t j = 0; j < kRecoverableBytes; ++j)
    out << j + 1 << ',' << report.successes[j] << ',' << report.runs << ',' << report.success_rate[j] << '\n';
}

void write_csv(std::ostream& out, const Spectrum& spectrum) {
  out << "bin_hz,magnitude\n";
  for (Eigen::Index k = 0; k < spectrum.magnitudes.size(); ++k)
    out << spectrum.bin_frequency(k) << ',' << spectrum.magnitudes[k] << '\n';
}

void write_csv(std::ostream& out, const Spectrogram& spectrogram) {
  out << "frame,bin_hz,magnitude\n";
  for (Eigen::Index f = 0; f < spectrogram.magnitudes.rows(); ++f)
    for (Eigen::Index k = 0; k < spectrogram.magnitudes.cols(); ++k)
      out << f << ',' << static_cast<double>(k) * spectrogram.bin_resolution_hz << ','
          << spectrogram.magnitudes(f, k) << '\n';
}

void write_csv(std::ostream& out, const SemaReport& report) {
  out << "set,trace,rms\n";
  for (Eigen::Index t = 0; t < report.per_trace_rms_active.size(); ++t)
    out << "active," << t << ',' << report.per_trace_rms_active[t] << '\n';
  for (Eigen::Index t = 0; t < report.per_trace_rms_idle.size(); ++t)
    out << "idle," << t << ',' << report.per_trace_rms_idle[t] << '\n';
}

void write_csv(std::ostream& out, const CorrelationSurface& surface) {
  out << "candidate,sample,rho\n";
  for (Eigen::Index c = 0; c < surface.rho.rows(); ++c)
    for (Eigen::Index s = 0; s < surface.rho.cols(); ++s)
      out << byte_hex(static_cast<std::uint8_t>(c)) << ',' << s << ',' << surface.rho(c, s) << '\n';
}

}  // namespace emsca
