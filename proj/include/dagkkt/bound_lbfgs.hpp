#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace dagkkt {

struct BoundLbfgsOptions {
  int memory = 10;
  int max_iterations = 500;
  /// Stop when the projected gradient sup-norm falls below this.
  double pg_tol = 1e-8;
  /// Stop when the relative decrease of f in one iteration falls below this.
  /// 0 disables the test.
  double f_rel_tol = 0.0;
  int max_backtracks = 50;
};

struct BoundLbfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  double pg_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  enum class Stop { ProjectedGradient, RelativeDecrease, MaxIterations, LineSearch } stop =
      Stop::MaxIterations;
};

/// f(x) returning the value and writing the gradient into `grad`.
using BoundObjective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

/// Limited-memory quasi-Newton on the box lower <= x <= upper. Variables at a
/// bound whose gradient points outward are frozen for the iteration; the
/// two-loop direction is taken on the remaining ones and the step is
/// projected back onto the box with Armijo backtracking.
///
/// Throws std::runtime_error if f is not finite at the starting point.
BoundLbfgsResult minimize_bounded(const BoundObjective& objective, Eigen::VectorXd x0,
                                  const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                  const BoundLbfgsOptions& options = {});

std::string to_string(BoundLbfgsResult::Stop stop);

}  // namespace dagkkt
