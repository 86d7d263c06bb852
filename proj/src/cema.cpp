#include "emsca/cema.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "emsca/errors.hpp"
#include "emsca/parallel.hpp"
#include "emsca/random.hpp"

namespace emsca {
namespace {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// HW(S(a ^ b)) for nibbles a, b; symmetric.
Eigen::Matrix<double, 16, 16> nibble_weight_table() {
  Eigen::Matrix<double, 16, 16> w;
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b) w(a, b) = hamming_weight(sbox(static_cast<std::uint8_t>(a ^ b)));
  return w;
}

CandidatePeak find_peak(const Eigen::MatrixXd& rho, Eigen::Index c) {
  CandidatePeak p;
  p.candidate = static_cast<std::uint8_t>(c);
  for (Eigen::Index s = 0; s < rho.cols(); ++s) {
    const double v = std::abs(rho(c, s));
    if (v > p.abs_rho) {
      p.abs_rho = v;
      p.rho = rho(c, s);
      p.sample = s;
    }
  }
  return p;
}

}  // namespace

CorrelationEngine::CorrelationEngine(const TraceSet& set) {
  if (set.trace_count() < 2) throw DataError("correlation needs at least two traces");
  const Eigen::Index n = set.trace_count();
  const Eigen::Index s = set.samples_per_trace();
  centered_ = set.samples.cast<double>();
  column_norms_.resize(s);
  constant_columns_.resize(s);
  for (Eigen::Index col = 0; col < s; ++col) {
    const auto raw = set.samples.col(col);
    constant_columns_[col] = raw.minCoeff() == raw.maxCoeff();
    double sum = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) sum += centered_(t, col);
    const double mean = sum / static_cast<double>(n);
    centered_.col(col).array() -= mean;
    column_norms_[col] = constant_columns_[col] ? 0.0 : centered_.col(col).norm();
  }
  for (int j = 0; j < kRecoverableBytes; ++j) {
    auto& bytes = plaintext_bytes_[j];
    bytes.reserve(static_cast<std::size_t>(n));
    for (const Block64& pt : set.plaintexts) bytes.push_back(pt.byte(j + 1));
  }
}

CorrelationSurface CorrelationEngine::finish(KeyBytePosition position, Eigen::MatrixXd covariance,
                                             const Eigen::VectorXd& hypothesis_norms) const {
  CorrelationSurface out{position, std::move(covariance), {}, constant_columns_, {}};
  out.constant_candidates = (hypothesis_norms.array() == 0.0);
  for (Eigen::Index c = 0; c < kCandidates; ++c) {
    for (Eigen::Index s = 0; s < samples(); ++s) {
      const double denom = hypothesis_norms[c] * column_norms_[s];
      out.rho(c, s) = denom > 0.0 ? out.rho(c, s) / denom : 0.0;
    }
  }
  out.peaks.reserve(kCandidates);
  for (Eigen::Index c = 0; c < kCandidates; ++c) out.peaks.push_back(find_peak(out.rho, c));
  return out;
}

CorrelationSurface CorrelationEngine::surface(const HypothesisMatrix& hypotheses) const {
  if (hypotheses.values.rows() != kCandidates)
    throw DataError("hypothesis matrix must have 256 candidate rows");
  if (hypotheses.traces() != traces())
    throw DataError("hypothesis covers " + std::to_string(hypotheses.traces()) + " traces, set has " +
                    std::to_string(traces()));
  Eigen::MatrixXd h = hypotheses.values.cast<double>();
  Eigen::VectorXd norms(kCandidates);
  for (Eigen::Index c = 0; c < kCandidates; ++c) {
    const bool constant = hypotheses.values.row(c).minCoeff() == hypotheses.values.row(c).maxCoeff();
    h.row(c).array() -= h.row(c).mean();
    norms[c] = constant ? 0.0 : h.row(c).norm();
  }
  Eigen::MatrixXd covariance = h * centered_;
  return finish(hypotheses.position, std::move(covariance), norms);
}

CorrelationSurface CorrelationEngine::surface(KeyBytePosition position) const {
  const auto& bytes = plaintext_bytes_[position.value() - 1];
  const Eigen::Index s = samples();

  // Centered samples summed per plaintext byte value, in trace order.
  RowMajorMatrix buckets = RowMajorMatrix::Zero(256, s);
  std::array<std::int64_t, 256> counts{};
  for (Eigen::Index t = 0; t < traces(); ++t) {
    const std::uint8_t p = bytes[static_cast<std::size_t>(t)];
    buckets.row(p) += centered_.row(t);
    ++counts[p];
  }

  // HW of a byte is the sum of its nibble weights, so the candidate
  // covariance separates into a high-nibble and a low-nibble term.
  RowMajorMatrix high = RowMajorMatrix::Zero(16, s);
  RowMajorMatrix low = RowMajorMatrix::Zero(16, s);
  for (int p = 0; p < 256; ++p) {
    if (counts[p] == 0) continue;
    high.row(p >> 4) += buckets.row(p);
    low.row(p & 0xF) += buckets.row(p);
  }
  static const Eigen::Matrix<double, 16, 16> weights = nibble_weight_table();
  const RowMajorMatrix high_cov = weights * high;
  const RowMajorMatrix low_cov = weights * low;

  Eigen::MatrixXd covariance(kCandidates, s);
  for (int c = 0; c < kCandidates; ++c) covariance.row(c) = high_cov.row(c >> 4) + low_cov.row(c & 0xF);

  // Hypothesis deviations from integer moments: sum n_p h^2 - (sum n_p h)^2 / N.
  const auto& table = hw_table();
  const auto n = static_cast<std::int64_t>(traces());
  Eigen::VectorXd norms(kCandidates);
  for (int c = 0; c < kCandidates; ++c) {
    std::int64_t sum = 0;
    std::int64_t sum_sq = 0;
    for (int p = 0; p < 256; ++p) {
      const std::int64_t h = table(p, c);
      sum += counts[p] * h;
      sum_sq += counts[p] * h * h;
    }
    const std::int64_t scaled = n * sum_sq - sum * sum;  // N * squared deviation
    norms[c] = std::sqrt(static_cast<double>(scaled) / static_cast<double>(n));
  }
  return finish(position, std::move(covariance), norms);
}

CorrelationSurface correlation_surface(const HypothesisMatrix& hypotheses, const TraceSet& set) {
  return CorrelationEngine(set).surface(hypotheses);
}

std::vector<RankedCandidate> rank_candidates(const CorrelationSurface& surface) {
  std::vector<RankedCandidate> ranking;
  ranking.reserve(surface.peaks.size());
  for (const auto& p : surface.peaks) ranking.push_back({p.candidate, p.abs_rho, p.sample});
  std::sort(ranking.begin(), ranking.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
    if (a.abs_rho != b.abs_rho) return a.abs_rho > b.abs_rho;
    return a.candidate < b.candidate;
  });
  return ranking;
}

double noise_floor_threshold(std::size_t traces, std::size_t comparisons, double alpha) {
  if (traces == 0) throw ConfigError("threshold needs a positive trace count");
  const double tail = alpha / static_cast<double>(std::max<std::size_t>(comparisons, 1));
  // Solve erfc(z / sqrt 2) = tail by bisection; erfc is decreasing.
  double lo = 0.0;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (std::erfc(mid / std::sqrt(2.0)) > tail)
      lo = mid;
    else
      hi = mid;
  }
  return std::max(4.0, hi) / std::sqrt(static_cast<double>(traces));
}

bool AttackReport::all_confident() const {
  return !bytes.empty() && std::all_of(bytes.begin(), bytes.end(), [](const ByteAttack& b) { return b.confident; });
}

std::uint64_t AttackReport::recovered_high() const {
  std::uint64_t high = 0;
  for (auto b : recovered_bytes) high = (high << 8) | b;
  return high;
}

AttackReport attack_key(const TraceSet& set, const AttackOptions& options) {
  if (set.trace_count() < 2) throw DataError("attack needs at least two traces");
  const TraceSet filtered =
      options.bands.empty() ? TraceSet{} : band_filter(set, options.bands, options.taper_hz, options.threads);
  const CorrelationEngine engine(options.bands.empty() ? set : filtered);

  AttackReport report;
  report.traces_used = static_cast<std::size_t>(set.trace_count());
  report.samples = static_cast<std::size_t>(set.samples_per_trace());
  report.threshold = noise_floor_threshold(report.traces_used,
                                           static_cast<std::size_t>(kCandidates) * report.samples, options.alpha);

  std::vector<std::optional<ByteAttack>> results(kRecoverableBytes);
  parallel_for(kRecoverableBytes, options.threads, [&](std::size_t j) {
    const KeyBytePosition position(static_cast<int>(j) + 1);
    ByteAttack byte{position, rank_candidates(engine.surface(position)), 0, 0.0, false};
    const double best = byte.ranking[0].abs_rho;
    const double second = byte.ranking[1].abs_rho;
    byte.recovered = byte.ranking[0].candidate;
    if (second > 0.0)
      byte.margin = best / second;
    else
      byte.margin = best > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
    byte.confident = best > report.threshold;
    results[j] = std::move(byte);
  });
  for (int j = 0; j < kRecoverableBytes; ++j) {
    report.recovered_bytes[static_cast<std::size_t>(j)] = results[static_cast<std::size_t>(j)]->recovered;
    report.bytes.push_back(std::move(*results[static_cast<std::size_t>(j)]));
  }
  return report;
}

Key80 pattern_key(KeyPattern pattern) {
  std::array<std::uint8_t, 10> bytes{};
  bytes.fill(static_cast<std::uint8_t>(pattern));
  return Key80::from_bytes(bytes);
}

std::uint64_t run_seed(std::uint64_t seed, std::size_t run) {
  return splitmix64(seed ^ splitmix64(0x5352000000000000ULL + run));
}

SrReport success_rate(KeyPattern pattern, std::size_t runs, std::size_t traces_per_run, const SynthConfig& cfg,
                      const AttackOptions& options) {
  if (runs == 0) throw ConfigError("success rate needs at least one run");
  if (traces_per_run < 2) throw ConfigError("success rate needs at least two traces per run");
  const Key80 key = pattern_key(pattern);
  SrReport report{pattern, runs, traces_per_run, {}, {}};
  for (std::size_t run = 0; run < runs; ++run) {
    SynthConfig run_cfg = cfg;
    run_cfg.seed = run_seed(cfg.seed, run);
    const AttackReport attack = attack_key(synthesize_set(traces_per_run, key, run_cfg), options);
    for (int j = 0; j < kRecoverableBytes; ++j)
      if (attack.recovered_bytes[static_cast<std::size_t>(j)] == key.byte(j + 1))
        ++report.successes[static_cast<std::size_t>(j)];
  }
  for (std::size_t j = 0; j < kRecoverableBytes; ++j)
    report.success_rate[j] = static_cast<double>(report.successes[j]) / static_cast<double>(runs);
  return report;
}

}  // namespace emsca
