// Simple EM analysis: amplitude statistics of encrypting versus idle traces.
#ifndef EMSCA_SEMA_HPP
#define EMSCA_SEMA_HPP

#include <Eigen/Core>

#include "emsca/trace.hpp"

namespace emsca {

/// Root mean square of x[start, end). Throws ConfigError on an empty or
/// out-of-range segment.
template <typename Derived>
double rms(const Eigen::MatrixBase<Derived>& x, Eigen::Index start, Eigen::Index end);

double rms(const Trace& trace, Eigen::Index start, Eigen::Index end);

struct SemaReport {
  double rms_active = 0.0;
  double rms_idle = 0.0;
  double peak_active = 0.0;
  double peak_idle = 0.0;
  double ratio_rms = 0.0;  // rms_active / rms_idle
  Eigen::VectorXd per_trace_rms_active;
  Eigen::VectorXd per_trace_rms_idle;
};

/// Aggregate RMS is taken over every sample of every trace; peaks are max |x|.
/// Throws DataError on mismatched sample rates or an all-zero idle set.
SemaReport compare_sets(const TraceSet& active, const TraceSet& idle);

}  // namespace emsca

#include "emsca/sema_impl.hpp"

#endif  // EMSCA_SEMA_HPP
