#include "dagkkt/bound_lbfgs.hpp"

#include <cmath>
#include <deque>
#include <algorithm>
#include <stdexcept>
#include <vector>

namespace dagkkt {

std::string to_string(BoundLbfgsResult::Stop stop) {
  switch (stop) {
    case BoundLbfgsResult::Stop::ProjectedGradient: return "projected-gradient";
    case BoundLbfgsResult::Stop::RelativeDecrease: return "relative-decrease";
    case BoundLbfgsResult::Stop::MaxIterations: return "max-iterations";
    case BoundLbfgsResult::Stop::LineSearch: return "line-search";
  }
  return "?";
}

namespace {

struct Pair {
  Eigen::VectorXd s, y;
  double rho;
};

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lower,
                        const Eigen::VectorXd& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

}  // namespace

BoundLbfgsResult minimize_bounded(const BoundObjective& objective, Eigen::VectorXd x0,
                                  const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                  const BoundLbfgsOptions& options) {
  const auto n = x0.size();
  if (lower.size() != n || upper.size() != n)
    throw std::invalid_argument("minimize_bounded: bound size mismatch");

  BoundLbfgsResult result;
  Eigen::VectorXd x = project(x0, lower, upper);
  Eigen::VectorXd g(n);
  double f = objective(x, g);
  ++result.evaluations;
  if (!std::isfinite(f) || !g.allFinite())
    throw std::runtime_error("minimize_bounded: objective not finite at the starting point");

  std::deque<Pair> memory;
  Eigen::VectorXd trial(n), g_trial(n), dir(n), q(n);
  std::vector<double> alpha(options.memory);
  Eigen::Array<bool, Eigen::Dynamic, 1> free(n);

  for (result.iterations = 0; result.iterations < options.max_iterations; ++result.iterations) {
    result.pg_norm = (project(x - g, lower, upper) - x).lpNorm<Eigen::Infinity>();
    if (result.pg_norm <= options.pg_tol) {
      result.stop = BoundLbfgsResult::Stop::ProjectedGradient;
      break;
    }
    for (Eigen::Index i = 0; i < n; ++i)
      free[i] = lower[i] < upper[i] && !(x[i] <= lower[i] && g[i] > 0.0) &&
                !(x[i] >= upper[i] && g[i] < 0.0);

    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      q = free.select(g, 0.0);
      if (!memory.empty()) {
        for (std::size_t k = memory.size(); k-- > 0;) {
          alpha[k] = memory[k].rho * memory[k].s.dot(q);
          q -= alpha[k] * memory[k].y;
        }
        const auto& last = memory.back();
        q *= last.s.dot(last.y) / last.y.squaredNorm();
        for (std::size_t k = 0; k < memory.size(); ++k) {
          const double beta = memory[k].rho * memory[k].y.dot(q);
          q += (alpha[k] - beta) * memory[k].s;
        }
      }
      dir = -free.select(q, 0.0);
      if (g.dot(dir) >= 0.0 || !dir.allFinite()) {
        memory.clear();
        dir = -free.select(g, 0.0);
      }
      double step = 1.0;
      if (memory.empty()) step = std::min(1.0, 1.0 / std::max(dir.lpNorm<Eigen::Infinity>(), 1e-300));

      for (int bt = 0; bt < options.max_backtracks; ++bt, step *= 0.5) {
        trial = project(x + step * dir, lower, upper);
        const double decrease = g.dot(trial - x);
        if (decrease >= 0.0) continue;
        const double f_trial = objective(trial, g_trial);
        ++result.evaluations;
        if (std::isfinite(f_trial) && g_trial.allFinite() && f_trial <= f + 1e-4 * decrease) {
          Eigen::VectorXd s = trial - x;
          Eigen::VectorXd y = g_trial - g;
          const double sy = s.dot(y);
          if (sy > 1e-12 * y.squaredNorm() && sy > 0.0) {
            memory.push_back({std::move(s), std::move(y), 1.0 / sy});
            if (static_cast<int>(memory.size()) > options.memory) memory.pop_front();
          }
          const double f_prev = f;
          x = trial;
          g = g_trial;
          f = f_trial;
          accepted = true;
          if (options.f_rel_tol > 0.0 && f_prev - f <=
              options.f_rel_tol * std::max({std::abs(f_prev), std::abs(f), 1.0})) {
            result.stop = BoundLbfgsResult::Stop::RelativeDecrease;
            ++result.iterations;
            result.x = std::move(x);
            result.f = f;
            result.pg_norm = (project(result.x - g, lower, upper) - result.x)
                                 .lpNorm<Eigen::Infinity>();
            return result;
          }
          break;
        }
      }
      if (!accepted) memory.clear();
    }
    if (!accepted) {
      result.stop = BoundLbfgsResult::Stop::LineSearch;
      break;
    }
  }
  result.x = std::move(x);
  result.f = f;
  result.pg_norm = (project(result.x - g, lower, upper) - result.x).lpNorm<Eigen::Infinity>();
  return result;
}

}  // namespace dagkkt
