#ifndef EMSCA_PEARSON_IMPL_HPP
#define EMSCA_PEARSON_IMPL_HPP

#include <cmath>

#include "emsca/errors.hpp"

namespace emsca {

template <typename DerivedX, typename DerivedY>
std::optional<double> pearson(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  if (x.size() != y.size()) throw DataError("pearson: vectors differ in length");
  if (x.size() < 2) throw DataError("pearson: need at least two points");
  const auto xd = x.derived().template cast<double>().array().eval();
  const auto yd = y.derived().template cast<double>().array().eval();
  if ((xd == xd(0)).all() || (yd == yd(0)).all()) return std::nullopt;
  const double n1 = static_cast<double>(x.size() - 1);
  const auto dx = (xd - xd.mean()).eval();
  const auto dy = (yd - yd.mean()).eval();
  const double cov = (dx * dy).sum() / n1;
  const double sx = std::sqrt(dx.square().sum() / n1);
  const double sy = std::sqrt(dy.square().sum() / n1);
  return cov / (sx * sy);
}

}  // namespace emsca

#endif  // EMSCA_PEARSON_IMPL_HPP
