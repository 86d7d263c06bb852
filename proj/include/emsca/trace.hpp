// In-memory trace sets. Samples are stored as one row-major matrix
// (traces x samples) so that a sample column across traces is a strided
// view and a single trace is a contiguous row.
#ifndef EMSCA_TRACE_HPP
#define EMSCA_TRACE_HPP

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "emsca/present.hpp"

namespace emsca {

using SampleMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Trace {
  Eigen::VectorXf samples;
  Block64 plaintext;
  std::optional<Block64> ciphertext;
};

struct TraceSet {
  SampleMatrix samples;
  std::vector<Block64> plaintexts;
  std::vector<Block64> ciphertexts;  // empty when the set carries none
  double sample_rate_hz = 0.0;
  std::optional<Key80> key;

  Eigen::Index trace_count() const { return samples.rows(); }
  Eigen::Index samples_per_trace() const { return samples.cols(); }
  bool has_ciphertexts() const { return !ciphertexts.empty(); }

  Trace trace(Eigen::Index i) const;

  /// Throws DataError if `traces` is empty or lengths differ.
  static TraceSet from_traces(const std::vector<Trace>& traces, double sample_rate_hz,
                              std::optional<Key80> key = std::nullopt);

  /// Checks the set invariants; throws DataError naming the first violation.
  void validate() const;
};

}  // namespace emsca

#endif  // EMSCA_TRACE_HPP
