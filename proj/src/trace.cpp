#include "emsca/trace.hpp"

#include <cmath>
#include <string>

#include "emsca/errors.hpp"

namespace emsca {

Trace TraceSet::trace(Eigen::Index i) const {
  Trace t{samples.row(i).transpose(), plaintexts[static_cast<std::size_t>(i)], std::nullopt};
  if (has_ciphertexts()) t.ciphertext = ciphertexts[static_cast<std::size_t>(i)];
  return t;
}

TraceSet TraceSet::from_traces(const std::vector<Trace>& traces, double sample_rate_hz,
                               std::optional<Key80> key) {
  if (traces.empty()) throw DataError("trace set needs at least one trace");
  const Eigen::Index length = traces.front().samples.size();
  const bool with_ct = traces.front().ciphertext.has_value();
  TraceSet set;
  set.samples.resize(static_cast<Eigen::Index>(traces.size()), length);
  set.sample_rate_hz = sample_rate_hz;
  set.key = key;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const Trace& t = traces[i];
    if (t.samples.size() != length)
      throw DataError("trace " + std::to_string(i) + " has " + std::to_string(t.samples.size()) +
                      " samples, expected " + std::to_string(length));
    if (t.ciphertext.has_value() != with_ct)
      throw DataError("trace " + std::to_string(i) + " disagrees on ciphertext presence");
    set.samples.row(static_cast<Eigen::Index>(i)) = t.samples.transpose();
    set.plaintexts.push_back(t.plaintext);
    if (with_ct) set.ciphertexts.push_back(*t.ciphertext);
  }
  set.validate();
  return set;
}

void TraceSet::validate() const {
  if (trace_count() < 1) throw DataError("trace set needs at least one trace");
  if (samples_per_trace() < 1) throw DataError("traces need at least one sample");
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz))
    throw DataError("sample rate must be positive and finite");
  if (plaintexts.size() != static_cast<std::size_t>(trace_count()))
    throw DataError("plaintext count does not match trace count");
  if (has_ciphertexts() && ciphertexts.size() != plaintexts.size())
    throw DataError("ciphertext count does not match trace count");
  for (Eigen::Index i = 0; i < trace_count(); ++i)
    if (!samples.row(i).allFinite())
      throw DataError("trace " + std::to_string(i) + " contains a non-finite sample");
}

}  // namespace emsca
