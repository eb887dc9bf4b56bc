#pragma once

#include "dagkkt/acyclicity.hpp"

namespace dagkkt {

struct StructureMetrics {
  int shd = 0;
  int nnz = 0;
  int extra = 0;
  int missing = 0;
  int reversed = 0;
};

/// Structural Hamming distance on the supports {|W_ij| > threshold}. A
/// reversed edge counts once.
StructureMetrics shd(const WeightMatrix& w_est, const WeightMatrix& w_true, double threshold = 0.0);

}  // namespace dagkkt
