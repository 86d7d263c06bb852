// Correlation EM analysis: Pearson correlation between Hamming-weight
// hypotheses and trace samples, candidate ranking, key-byte recovery and
// success-rate evaluation.
#ifndef EMSCA_CEMA_HPP
#define EMSCA_CEMA_HPP

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "emsca/dsp.hpp"
#include "emsca/leakage.hpp"
#include "emsca/synth.hpp"
#include "emsca/trace.hpp"

namespace emsca {

/// Sample Pearson coefficient of two equally long vectors (n-1 normalisation
/// in both covariance and deviations, which cancels in the ratio). Returns
/// nullopt when either input is constant. Throws DataError when the lengths
/// differ or fewer than two points are given.
template <typename DerivedX, typename DerivedY>
std::optional<double> pearson(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y);

struct CandidatePeak {
  std::uint8_t candidate = 0;
  double abs_rho = 0.0;  // max over samples of |rho|
  double rho = 0.0;      // signed value at that sample
  Eigen::Index sample = 0;
};

struct CorrelationSurface {
  KeyBytePosition position;
  Eigen::MatrixXd rho;                           // 256 candidates x S samples
  std::vector<CandidatePeak> peaks;              // indexed by candidate
  Eigen::Array<bool, Eigen::Dynamic, 1> constant_columns;     // samples identical across traces
  Eigen::Array<bool, Eigen::Dynamic, 1> constant_candidates;  // hypothesis row without variance

  /// True when any entry was left at 0 because the correlation is undefined.
  bool has_undefined() const { return constant_columns.any() || constant_candidates.any(); }
};

/// Correlation engine over one (immutable) trace set. Column means and norms
/// are computed once and shared by every surface.
class CorrelationEngine {
 public:
  /// Throws DataError for fewer than two traces.
  explicit CorrelationEngine(const TraceSet& set);

  Eigen::Index traces() const { return centered_.rows(); }
  Eigen::Index samples() const { return centered_.cols(); }

  /// General path: any 256 x N hypothesis matrix. Throws DataError when the
  /// hypothesis trace count differs from the set's.
  CorrelationSurface surface(const HypothesisMatrix& hypotheses) const;

  /// Round-1 S-box hypothesis for `position` built from the set's plaintexts.
  /// Equal to surface(hypothesis_matrix(plaintexts, position)); evaluated by
  /// bucketing traces on the plaintext byte and splitting the byte Hamming
  /// weight into its two nibble terms.
  CorrelationSurface surface(KeyBytePosition position) const;

 private:
  CorrelationSurface finish(KeyBytePosition position, Eigen::MatrixXd covariance,
                            const Eigen::VectorXd& hypothesis_norms) const;

  Eigen::MatrixXd centered_;  // traces x samples, column means removed
  Eigen::RowVectorXd column_norms_;
  Eigen::Array<bool, Eigen::Dynamic, 1> constant_columns_;
  std::vector<std::uint8_t> plaintext_bytes_[kRecoverableBytes];
};

CorrelationSurface correlation_surface(const HypothesisMatrix& hypotheses, const TraceSet& set);

struct RankedCandidate {
  std::uint8_t candidate = 0;
  double abs_rho = 0.0;
  Eigen::Index sample = 0;
};

/// All 256 candidates by peak |rho| descending; ties go to the smaller value.
std::vector<RankedCandidate> rank_candidates(const CorrelationSurface& surface);

/// Peak |rho| a null (key-independent) candidate is unlikely to reach:
/// z / sqrt(N), with z the two-sided normal quantile for family-wise error
/// `alpha` over `comparisons` tests, and never below 4.
double noise_floor_threshold(std::size_t traces, std::size_t comparisons, double alpha = 0.01);

struct AttackOptions {
  std::vector<BandSpec> bands;  // applied before correlating when non-empty
  double taper_hz = 0.0;
  double alpha = 0.01;          // family-wise false-confidence rate per byte
  std::size_t threads = 0;
};

struct ByteAttack {
  KeyBytePosition position;
  std::vector<RankedCandidate> ranking;
  std::uint8_t recovered = 0;
  double margin = 0.0;  // best / second-best peak |rho|
  bool confident = false;
};

struct AttackReport {
  std::vector<ByteAttack> bytes;  // key byte positions 1..8
  std::array<std::uint8_t, kRecoverableBytes> recovered_bytes{};
  std::size_t traces_used = 0;
  std::size_t samples = 0;
  double threshold = 0.0;

  bool all_confident() const;
  /// Top 64 key bits implied by the recovered bytes.
  std::uint64_t recovered_high() const;
};

/// Recovers key bytes 1..8. Bytes 9 and 10 never enter round 1 and are not
/// attempted. Throws DataError for fewer than two traces.
AttackReport attack_key(const TraceSet& set, const AttackOptions& options = {});

/// Key-byte patterns used for success-rate evaluation.
enum class KeyPattern : std::uint8_t {
  zeros = 0x00,        // 00000000b
  alternating = 0x55,  // 01010101b
  inverted = 0xAA,     // 10101010b
  ones = 0xFF,         // 11111111b
};

inline constexpr std::array<KeyPattern, 4> kKeyPatterns = {KeyPattern::zeros, KeyPattern::alternating,
                                                           KeyPattern::inverted, KeyPattern::ones};

Key80 pattern_key(KeyPattern pattern);

struct SrReport {
  KeyPattern pattern = KeyPattern::zeros;
  std::size_t runs = 0;
  std::size_t traces_per_run = 0;
  std::array<std::size_t, kRecoverableBytes> successes{};
  std::array<double, kRecoverableBytes> success_rate{};  // successes / runs
};

/// Seed for run `run` of a success-rate experiment with master seed `seed`.
std::uint64_t run_seed(std::uint64_t seed, std::size_t run);

/// Independent attacks on freshly synthesised sets; per byte, the fraction
/// of runs whose rank-1 candidate is the true key byte.
SrReport success_rate(KeyPattern pattern, std::size_t runs, std::size_t traces_per_run,
                      const SynthConfig& cfg, const AttackOptions& options = {});

}  // namespace emsca

#include "emsca/pearson_impl.hpp"

#endif  // EMSCA_CEMA_HPP
