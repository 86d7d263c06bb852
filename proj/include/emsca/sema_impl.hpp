#ifndef EMSCA_SEMA_IMPL_HPP
#define EMSCA_SEMA_IMPL_HPP

#include <cmath>
#include <string>

#include "emsca/errors.hpp"

namespace emsca {

template <typename Derived>
double rms(const Eigen::MatrixBase<Derived>& x, Eigen::Index start, Eigen::Index end) {
  if (start < 0 || end > x.size() || start >= end)
    throw ConfigError("rms segment [" + std::to_string(start) + ", " + std::to_string(end) +
                      ") is empty or outside " + std::to_string(x.size()) + " samples");
  const auto segment = x.derived().segment(start, end - start).template cast<double>();
  return std::sqrt(segment.squaredNorm() / static_cast<double>(end - start));
}

}  // namespace emsca

#endif  // EMSCA_SEMA_IMPL_HPP
