#pragma once

#include "dagkkt/constraint_set.hpp"
#include "dagkkt/score.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace dagkkt {

struct PathEvent {
  enum class Kind { JoinActive, LeaveActive, TargetReachedZero, PenaltyExhausted, CycleEdgeRemoved };
  Kind kind = Kind::JoinActive;
  int row = -1;
  int column = -1;
  double gamma = 0.0;
  /// Penalty parameter after the step.
  double alpha = 0.0;
};

std::string to_string(PathEvent::Kind kind);
/// CSV with header step,kind,row,column,gamma,alpha.
void write_event_trace(std::ostream& out, const std::vector<PathEvent>& events);

/// Snapshot of one column subproblem along a path. w and g are full length d;
/// sign is +-1 on the active set and 0 elsewhere.
struct LarsColumnState {
  int column = 0;
  Eigen::VectorXd w;
  Eigen::VectorXd g;
  Eigen::VectorXd sign;
  double alpha = 0.0;

  std::vector<int> active() const;
};

struct ColumnPathResult {
  Eigen::VectorXd w;
  std::vector<PathEvent> events;
  /// Penalty on the targeted coefficient where the path stopped.
  double alpha_end = 0.0;
};

/// Minimizer of (1/2n)||X_j - X w||^2 + tau ||w||_1 over rows i with
/// (i, j) not in Z. Requires (j, j) in Z (always true for ConstraintSet).
Eigen::VectorXd solve_column_lasso(int j, const ConstraintSet& z, const ScoreConfig& score,
                                   std::vector<PathEvent>* trace = nullptr);

/// Starting from w_opt optimal for Z, grows a penalty on |w_{i0}| until the
/// coefficient reaches zero. The result is optimal for Z + {(i0, j)}.
/// No-op if w_opt[i0] == 0.
ColumnPathResult path_add_constraint(const Eigen::VectorXd& w_opt, int j, int i0,
                                     const ConstraintSet& z, const ScoreConfig& score);

/// Starting from w_opt optimal for Z with (i0, j) in Z, shrinks the implied
/// penalty |g_{i0}| - tau to zero. The result is optimal for Z - {(i0, j)}.
ColumnPathResult path_relax_constraint(const Eigen::VectorXd& w_opt, int j, int i0,
                                       const ConstraintSet& z, const ScoreConfig& score);

struct WeightedRemovalResult {
  int row = -1;
  int column = -1;
  double alpha = 0.0;
  std::vector<PathEvent> events;
};

/// Follows min_W F(W) + alpha * sum_ij P_ij |W_ij| subject to Z from alpha = 0
/// and returns the first leaving entry with W_ij != 0 and P_ij > 0.
/// Throws std::logic_error if the path ends without such an event.
WeightedRemovalResult path_weighted_removal(const WeightMatrix& w_opt, const ConstraintSet& z,
                                            const Eigen::MatrixXd& p, const ScoreConfig& score);

/// Largest violation of the lasso optimality conditions of column j under Z:
/// |g_i - sign(w_i) tau| on the support, (|g_i| - tau)_+ off it.
double column_kkt_violation(const Eigen::VectorXd& w, int j, const ConstraintSet& z,
                            const ScoreConfig& score);

}  // namespace dagkkt
