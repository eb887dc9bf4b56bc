#pragma once

#include "dagkkt/acyclicity.hpp"
#include "dagkkt/constraint_set.hpp"
#include "dagkkt/score.hpp"

#include <string>
#include <utility>
#include <vector>

namespace dagkkt {

enum class EntryStatus { Diagonal, FreeOptimal, CycleBlocked, Violation };

struct KktViolation {
  int row = -1;
  int column = -1;
  double magnitude = 0.0;
  std::string reason;
};

struct KktReport {
  bool feasible = false;
  bool pass = false;
  double h = 0.0;
  /// Multiplier from the max-ratio construction; 0 without blocked entries.
  double lambda = 0.0;
  /// Worst violation of M+- >= 0 over entries whose walk gradient is zero.
  double max_stationarity = 0.0;
  /// Worst |M+-| on the support (should be zero by complementary slackness).
  double max_complementarity = 0.0;
  int dimension = 0;
  std::vector<EntryStatus> status;  // row-major d x d
  std::vector<KktViolation> violations;

  EntryStatus at(int i, int j) const { return status[static_cast<std::size_t>(i) * dimension + j]; }
};

struct KktTolerances {
  double eps = 1e-10;
  double stationarity = 1e-6;
  double walk = kWalkTol;
};

/// Checks the first-order system for the |W| formulation at (W)+, (W)-.
KktReport verify_kkt(const WeightMatrix& w, const ScoreConfig& score, const AcyclicitySpec& spec,
                     const KktTolerances& tol = {});

/// Off-diagonal pairs (i,j) with (grad h(|W|))_ij > tol, row-major.
std::vector<std::pair<int, int>> compute_P(const WeightMatrix& w, const AcyclicitySpec& spec,
                                           double tol = kWalkTol);

struct IrreducibilityReport {
  bool irreducible = true;
  /// Constraints with no return path whose relaxation would change W.
  std::vector<std::pair<int, int>> witnesses;
};

IrreducibilityReport check_irreducible(const ConstraintSet& z, const WeightMatrix& w,
                                       const AcyclicitySpec& spec, const ScoreConfig& score,
                                       double tol = kWalkTol);

std::string to_string(EntryStatus s);

}  // namespace dagkkt
