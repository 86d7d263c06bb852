#include "emsca/sema.hpp"

namespace emsca {
namespace {

struct Amplitudes {
  double rms = 0.0;
  double peak = 0.0;
  Eigen::VectorXd per_trace;
};

Amplitudes measure(const TraceSet& set) {
  Amplitudes a;
  const Eigen::Index n = set.samples_per_trace();
  a.per_trace.resize(set.trace_count());
  double sum_squares = 0.0;
  for (Eigen::Index t = 0; t < set.trace_count(); ++t) {
    const auto row = set.samples.row(t).cast<double>();
    const double sq = row.squaredNorm();
    sum_squares += sq;
    a.per_trace[t] = std::sqrt(sq / static_cast<double>(n));
    a.peak = std::max(a.peak, row.cwiseAbs().maxCoeff());
  }
  a.rms = std::sqrt(sum_squares / static_cast<double>(n * set.trace_count()));
  return a;
}

}  // namespace

double rms(const Trace& trace, Eigen::Index start, Eigen::Index end) { return rms(trace.samples, start, end); }

SemaReport compare_sets(const TraceSet& active, const TraceSet& idle) {
  if (active.trace_count() < 1 || idle.trace_count() < 1) throw DataError("SEMA needs non-empty sets");
  if (active.sample_rate_hz != idle.sample_rate_hz)
    throw DataError("SEMA sets have different sample rates (" + std::to_string(active.sample_rate_hz) +
                    " vs " + std::to_string(idle.sample_rate_hz) + " Hz)");
  Amplitudes a = measure(active);
  Amplitudes i = measure(idle);
  if (!(i.rms > 0.0)) throw DataError("idle set has zero RMS; the amplitude ratio is undefined");
  SemaReport r;
  r.rms_active = a.rms;
  r.rms_idle = i.rms;
  r.peak_active = a.peak;
  r.peak_idle = i.peak;
  r.ratio_rms = a.rms / i.rms;
  r.per_trace_rms_active = std::move(a.per_trace);
  r.per_trace_rms_idle = std::move(i.per_trace);
  return r;
}

}  // namespace emsca
