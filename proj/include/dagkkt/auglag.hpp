#pragma once

#include "dagkkt/acyclicity.hpp"
#include "dagkkt/bound_lbfgs.hpp"
#include "dagkkt/score.hpp"

#include <optional>
#include <string>

namespace dagkkt {

struct AugLagConfig {
  enum class Mode { Quadratic, AbsSplit };

  Mode mode = Mode::Quadratic;
  double alpha0 = 0.0;
  double rho0 = 1.0;
  double rho_factor = 10.0;
  double rho_max = 1e16;
  /// Required reduction of h per accepted outer step.
  double progress_rate = 0.25;
  double eps = 1e-10;
  double omega = 0.3;
  int max_outer_iterations = 100;
  BoundLbfgsOptions inner;
  /// Defaults to the binomial family at the data dimension.
  std::optional<AcyclicitySpec> spec;

  /// Early-stopping configuration used to initialize KKTS (eps = 1e-5).
  static AugLagConfig warm_start_preset(Mode mode = Mode::Quadratic);

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

std::string to_string(AugLagConfig::Mode mode);
AugLagConfig::Mode parse_auglag_mode(const std::string& text);

struct SolveResult {
  WeightMatrix W;      // after thresholding
  WeightMatrix W_raw;  // before thresholding
  double h_final = 0.0;
  int iterations = 0;
  int inner_evaluations = 0;
  double time_s = 0.0;
  double rho_final = 0.0;
  double alpha_final = 0.0;
  /// AbsSplit only: the nonnegative pair after reducing W+ o W- to zero.
  WeightMatrix W_plus, W_minus;
};

SolveResult solve_quadratic(const ScoreConfig& score, const AugLagConfig& cfg);
SolveResult solve_abs(const ScoreConfig& score, const AugLagConfig& cfg);
/// Dispatches on cfg.mode.
SolveResult solve_auglag(const ScoreConfig& score, const AugLagConfig& cfg);

/// Zeroes entries with |W_ij| < omega.
WeightMatrix threshold_matrix(const WeightMatrix& w, double omega);

}  // namespace dagkkt
