#pragma once

#include "dagkkt/auglag.hpp"
#include "dagkkt/constraint_set.hpp"
#include "dagkkt/score.hpp"

#include <optional>
#include <set>
#include <utility>

namespace dagkkt {

struct KktsConfig {
  double omega = 0.3;
  double eps = 1e-10;
  /// 0 means d*d.
  int max_removal_iterations = 0;
  /// 0 means 50*d*d.
  int max_reduce_iterations = 0;
  bool enable_reduce = true;
  bool enable_reverse = true;
  /// Throw instead of counting when h > eps after a restore.
  bool strict_invariants = false;
  /// Defaults to the binomial family at the data dimension.
  std::optional<AcyclicitySpec> spec;

  void validate() const;
};

struct KktsCounters {
  int removals = 0;
  int restores = 0;
  int reversals_attempted = 0;
  int reversals_accepted = 0;
  int reduce_rounds = 0;
  /// Restores after which h(|W|) exceeded eps.
  int restore_feasibility_failures = 0;
  double max_h_after_restore = 0.0;
};

struct KktsState {
  KktsState(ConstraintSet z, WeightMatrix w, AcyclicitySpec spec);

  ConstraintSet Z;
  WeightMatrix W;
  Eigen::MatrixXd A;
  Eigen::MatrixXd gradP;
  double h = 0.0;
  AcyclicitySpec spec;
  std::set<std::pair<int, int>> reversal_memory;
  KktsCounters counters;

  /// Recomputes A = |W|, gradP and h.
  void refresh();
  /// Adds every (i,j) with W_ij = 0 and gradP_ij > 0 to Z. W stays optimal.
  void absorb_blocked_zeros();
};

/// Z = {|W_init| < omega} plus the diagonal; every column re-solved under Z.
KktsState init_from_matrix(const WeightMatrix& w_init, const KktsConfig& cfg,
                           const ScoreConfig& score);
/// Z = diagonal; columns are the unconstrained lasso solutions.
KktsState init_unconstrained(const KktsConfig& cfg, const ScoreConfig& score);

/// Removes one cycle edge at a time until h(|W|) <= eps.
void removal_phase(KktsState& state, const KktsConfig& cfg, const ScoreConfig& score);
/// Alternates single restores of unnecessary constraints with reversal sweeps.
void reduce_phase(KktsState& state, const KktsConfig& cfg, const ScoreConfig& score);

struct KktsResult {
  SolveResult solve;
  KktsCounters counters;
  int constraint_count = 0;
};

KktsResult run_kkts(const WeightMatrix& w_init, const KktsConfig& cfg, const ScoreConfig& score);
/// Starts from init_unconstrained.
KktsResult run_kkts_unconstrained(const KktsConfig& cfg, const ScoreConfig& score);
KktsResult run_kkts_from_state(KktsState state, const KktsConfig& cfg, const ScoreConfig& score);

}  // namespace dagkkt
