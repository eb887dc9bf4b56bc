#include "dagkkt/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace dagkkt {

StructureMetrics shd(const WeightMatrix& w_est, const WeightMatrix& w_true, double threshold) {
  const auto d = w_est.rows();
  if (w_est.cols() != d || w_true.rows() != d || w_true.cols() != d)
    throw std::invalid_argument("shd: dimension mismatch");
  auto est = [&](Eigen::Index i, Eigen::Index j) { return std::abs(w_est(i, j)) > threshold; };
  auto tru = [&](Eigen::Index i, Eigen::Index j) { return std::abs(w_true(i, j)) > threshold; };

  StructureMetrics m;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      if (!est(i, j)) continue;
      ++m.nnz;
      if (tru(i, j)) continue;
      if (i != j && tru(j, i) && !est(j, i))
        ++m.reversed;
      else
        ++m.extra;
    }
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      if (tru(i, j) && !est(i, j) && !(i != j && est(j, i) && !tru(j, i))) ++m.missing;
  m.shd = m.extra + m.missing + m.reversed;
  return m;
}

}  // namespace dagkkt
