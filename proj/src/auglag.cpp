#include "dagkkt/auglag.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dagkkt {

AugLagConfig AugLagConfig::warm_start_preset(Mode mode) {
  AugLagConfig cfg;
  cfg.mode = mode;
  cfg.eps = 1e-5;
  return cfg;
}

void AugLagConfig::validate() const {
  if (!(rho0 > 0.0)) throw std::invalid_argument("auglag: rho0 must be > 0");
  if (!(rho_factor > 1.0)) throw std::invalid_argument("auglag: rho_factor must be > 1");
  if (!(progress_rate > 0.0 && progress_rate < 1.0))
    throw std::invalid_argument("auglag: progress rate must lie in (0,1)");
  if (!(eps > 0.0)) throw std::invalid_argument("auglag: eps must be > 0");
  if (!(omega >= 0.0)) throw std::invalid_argument("auglag: omega must be >= 0");
  if (max_outer_iterations < 1) throw std::invalid_argument("auglag: need >= 1 outer iteration");
}

std::string to_string(AugLagConfig::Mode mode) {
  return mode == AugLagConfig::Mode::Quadratic ? "quadratic" : "abs";
}

AugLagConfig::Mode parse_auglag_mode(const std::string& text) {
  if (text == "quadratic" || text == "notears") return AugLagConfig::Mode::Quadratic;
  if (text == "abs") return AugLagConfig::Mode::AbsSplit;
  throw std::invalid_argument("unknown auglag mode '" + text + "'");
}

WeightMatrix threshold_matrix(const WeightMatrix& w, double omega) {
  return (w.array().abs() < omega).select(0.0, w);
}

namespace {

using Mode = AugLagConfig::Mode;

struct SplitView {
  int d;
  Eigen::Map<const Eigen::MatrixXd> plus, minus;
  SplitView(const Eigen::VectorXd& x, int d)
      : d(d), plus(x.data(), d, d), minus(x.data() + d * d, d, d) {}
};

double adjacency_h(const Eigen::VectorXd& x, int d, Mode mode, const AcyclicitySpec& spec) {
  SplitView v(x, d);
  if (mode == Mode::Quadratic) return h_value(AdjacencyMatrix::square_of(v.plus - v.minus), spec);
  return h_value(AdjacencyMatrix(v.plus + v.minus), spec);
}

SolveResult run(const ScoreConfig& score, const AugLagConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const int d = score.dimension();
  const AcyclicitySpec spec = cfg.spec ? *cfg.spec : AcyclicitySpec::binomial(d);
  if (spec.dimension() != d) throw std::invalid_argument("auglag: spec dimension mismatch");
  const double tau = score.tau();
  const Mode mode = cfg.mode;
  const Eigen::Index nvar = 2 * static_cast<Eigen::Index>(d) * d;

  Eigen::VectorXd lower = Eigen::VectorXd::Zero(nvar);
  Eigen::VectorXd upper = Eigen::VectorXd::Constant(nvar, std::numeric_limits<double>::infinity());
  for (int half = 0; half < 2; ++half)
    for (int i = 0; i < d; ++i) upper[half * d * d + i * d + i] = 0.0;

  double alpha = cfg.alpha0;
  double rho = cfg.rho0;

  const BoundObjective objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    SplitView v(x, d);
    const WeightMatrix w = v.plus - v.minus;
    const Eigen::MatrixXd lg = loss_grad(w, score);
    const double f_loss = loss(w, score);
    AcyclicityEval ev = mode == Mode::Quadratic
                            ? evaluate_acyclicity(AdjacencyMatrix::square_of(w), spec)
                            : evaluate_acyclicity(AdjacencyMatrix(v.plus + v.minus), spec);
    const double h = ev.value;
    const double mult = alpha + rho * h;
    grad.resize(nvar);
    Eigen::Map<Eigen::MatrixXd> gp(grad.data(), d, d), gm(grad.data() + d * d, d, d);
    if (mode == Mode::Quadratic) {
      Eigen::MatrixXd gw = lg + mult * ev.gradient.cwiseProduct(2.0 * w);
      gp = gw.array() + tau;
      gm = (-gw).array() + tau;
    } else {
      Eigen::MatrixXd common = (mult * ev.gradient).array() + tau;
      gp = lg + common;
      gm = -lg + common;
    }
    return f_loss + tau * x.sum() + alpha * h + 0.5 * rho * h * h;
  };

  SolveResult res;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(nvar);
  double h = std::numeric_limits<double>::infinity();
  double rho_used = rho;
  for (int outer = 0; outer < cfg.max_outer_iterations; ++outer) {
    ++res.iterations;
    bool exhausted = false;
    while (true) {
      const BoundLbfgsResult sol = minimize_bounded(objective, x, lower, upper, cfg.inner);
      res.inner_evaluations += sol.evaluations;
      if (!std::isfinite(sol.f))
        throw std::runtime_error("auglag: inner solve diverged (rho=" + std::to_string(rho) +
                                 ", alpha=" + std::to_string(alpha) + ")");
      const double h_new = adjacency_h(sol.x, d, mode, spec);
      rho_used = rho;
      if (h_new > cfg.progress_rate * h) {
        rho *= cfg.rho_factor;
        if (rho > cfg.rho_max) {
          // Keep the last solve; no further escalation is allowed.
          x = sol.x;
          h = h_new;
          exhausted = true;
          break;
        }
        continue;
      }
      x = sol.x;
      h = h_new;
      break;
    }
    if (exhausted) break;
    alpha += rho * h;
    if (h <= cfg.eps) break;
  }

  SplitView v(x, d);
  res.W_raw = v.plus - v.minus;
  if (mode == Mode::AbsSplit) {
    const Eigen::MatrixXd m = v.plus.cwiseMin(v.minus);
    res.W_plus = v.plus - m;
    res.W_minus = v.minus - m;
    res.h_final = h_value(AdjacencyMatrix::abs_of(res.W_raw), spec);
  } else {
    res.h_final = h_value(AdjacencyMatrix::square_of(res.W_raw), spec);
  }
  res.W = threshold_matrix(res.W_raw, cfg.omega);
  res.rho_final = rho_used;
  res.alpha_final = alpha;
  res.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace

SolveResult solve_quadratic(const ScoreConfig& score, const AugLagConfig& cfg) {
  if (cfg.mode != Mode::Quadratic) throw std::invalid_argument("solve_quadratic: mode is abs");
  return run(score, cfg);
}

SolveResult solve_abs(const ScoreConfig& score, const AugLagConfig& cfg) {
  if (cfg.mode != Mode::AbsSplit) throw std::invalid_argument("solve_abs: mode is quadratic");
  return run(score, cfg);
}

SolveResult solve_auglag(const ScoreConfig& score, const AugLagConfig& cfg) {
  return run(score, cfg);
}

}  // namespace dagkkt
