#include "dagkkt/kkts.hpp"

#include "dagkkt/lars.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace dagkkt {

void KktsConfig::validate() const {
  if (!(omega >= 0.0)) throw std::invalid_argument("kkts: omega must be >= 0");
  if (!(eps > 0.0)) throw std::invalid_argument("kkts: eps must be > 0");
  if (max_removal_iterations < 0 || max_reduce_iterations < 0)
    throw std::invalid_argument("kkts: iteration caps must be >= 0");
}

KktsState::KktsState(ConstraintSet z, WeightMatrix w, AcyclicitySpec s)
    : Z(std::move(z)), W(std::move(w)), spec(std::move(s)) {
  refresh();
}

void KktsState::refresh() {
  A = W.cwiseAbs();
  AcyclicityEval ev = evaluate_acyclicity(AdjacencyMatrix(A), spec);
  h = ev.value;
  gradP = std::move(ev.gradient);
}

void KktsState::absorb_blocked_zeros() {
  const int d = Z.dimension();
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i)
      if (W(i, j) == 0.0 && gradP(i, j) > kWalkTol) Z.insert(i, j);
}

namespace {

AcyclicitySpec spec_for(const KktsConfig& cfg, int d) {
  AcyclicitySpec spec = cfg.spec ? *cfg.spec : AcyclicitySpec::binomial(d);
  if (spec.dimension() != d) throw std::invalid_argument("kkts: spec dimension mismatch");
  return spec;
}

WeightMatrix solve_all_columns(const ConstraintSet& z, const ScoreConfig& score) {
  const int d = score.dimension();
  WeightMatrix w(d, d);
  for (int j = 0; j < d; ++j) w.col(j) = solve_column_lasso(j, z, score);
  return w;
}

void forget_columns(KktsState& st, int a, int b) {
  for (auto it = st.reversal_memory.begin(); it != st.reversal_memory.end();) {
    const auto [i, j] = *it;
    if (i == a || j == a || i == b || j == b)
      it = st.reversal_memory.erase(it);
    else
      ++it;
  }
}

bool restore_one(KktsState& st, const KktsConfig& cfg, const ScoreConfig& score) {
  const int d = score.dimension();
  const Eigen::MatrixXd grad = loss_grad(st.W, score);
  int bi = -1, bj = -1;
  double best = score.tau();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (i == j || !st.Z.contains(i, j) || st.gradP(i, j) > kWalkTol) continue;
      if (std::abs(grad(i, j)) > best) {
        best = std::abs(grad(i, j));
        bi = i;
        bj = j;
      }
    }
  if (bi < 0) return false;

  const ColumnPathResult r = path_relax_constraint(st.W.col(bj), bj, bi, st.Z, score);
  st.Z.erase(bi, bj);
  st.W.col(bj) = r.w;
  st.refresh();
  ++st.counters.restores;
  st.counters.max_h_after_restore = std::max(st.counters.max_h_after_restore, st.h);
  if (st.h > cfg.eps) {
    ++st.counters.restore_feasibility_failures;
    if (cfg.strict_invariants) {
      std::ostringstream msg;
      msg << "kkts: h = " << st.h << " > eps after restoring (" << bi << "," << bj << ")";
      throw std::logic_error(msg.str());
    }
  }
  forget_columns(st, bj, bj);
  st.absorb_blocked_zeros();
  return true;
}

struct ReversalCandidate {
  int i, j;
  double key;
};

std::vector<ReversalCandidate> reversal_candidates(const KktsState& st, const ScoreConfig& score) {
  const int d = score.dimension();
  const Eigen::MatrixXd grad = loss_grad(st.W, score);
  std::vector<ReversalCandidate> out;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (st.W(i, j) != 0.0 && st.Z.contains(j, i) && !st.reversal_memory.count({i, j}))
        out.push_back({i, j, std::abs(grad(j, i))});
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.key > b.key;  // row-major generation order breaks ties
  });
  return out;
}

// One full sweep; returns true if any reversal was accepted.
bool reversal_sweep(KktsState& st, const ScoreConfig& score, int& budget) {
  bool any = false;
  auto cands = reversal_candidates(st, score);
  for (std::size_t k = 0; k < cands.size();) {
    if (--budget < 0) throw std::runtime_error("kkts: reduce phase iteration cap exceeded");
    const auto [i, j, key] = cands[k++];
    (void)key;
    if (st.reversal_memory.count({i, j})) continue;
    st.reversal_memory.insert({i, j});
    ++st.counters.reversals_attempted;
    // Relaxing (j,i) is a no-op when |g_ji| <= tau, so the move would only
    // delete (i,j), which cannot lower F below the constrained optimum.
    if (std::abs(column_neg_grad(st.W.col(i), i, score)[j]) <= score.tau()) continue;

    const double f_old = dagkkt::score(st.W, score);
    const double h_old = st.h;
    const Eigen::VectorXd col_i = st.W.col(i), col_j = st.W.col(j);

    const ColumnPathResult add = path_add_constraint(col_j, j, i, st.Z, score);
    st.Z.insert(i, j);
    st.W.col(j) = add.w;
    const ColumnPathResult rel = path_relax_constraint(col_i, i, j, st.Z, score);
    st.Z.erase(j, i);
    st.W.col(i) = rel.w;
    st.refresh();
    const double f_new = dagkkt::score(st.W, score);
    const double ftol = 1e-12 * std::max(1.0, std::abs(f_old));
    const bool accept = f_new <= f_old + ftol && st.h <= h_old &&
                        (f_new < f_old - ftol || st.h < h_old);
    if (accept) {
      ++st.counters.reversals_accepted;
      forget_columns(st, i, j);
      st.reversal_memory.insert({j, i});
      st.absorb_blocked_zeros();
      any = true;
      cands = reversal_candidates(st, score);
      k = 0;
    } else {
      st.Z.insert(j, i);
      st.Z.erase(i, j);
      st.W.col(i) = col_i;
      st.W.col(j) = col_j;
      st.refresh();
    }
  }
  return any;
}

KktsResult finish(KktsState& st, const KktsConfig& cfg, std::chrono::steady_clock::time_point t0,
                  int rounds) {
  KktsResult res;
  res.solve.W_raw = st.W;
  res.solve.W = threshold_matrix(st.W, cfg.omega);
  res.solve.h_final = st.h;
  res.solve.iterations = rounds;
  res.counters = st.counters;
  res.constraint_count = st.Z.size();
  res.solve.time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

KktsResult run_timed(KktsState st, const KktsConfig& cfg, const ScoreConfig& score,
                     std::chrono::steady_clock::time_point t0) {
  removal_phase(st, cfg, score);
  reduce_phase(st, cfg, score);
  return finish(st, cfg, t0, st.counters.removals + st.counters.reduce_rounds);
}

}  // namespace


KktsState init_from_matrix(const WeightMatrix& w_init, const KktsConfig& cfg,
                           const ScoreConfig& score) {
  cfg.validate();
  const int d = score.dimension();
  if (w_init.rows() != d || w_init.cols() != d)
    throw std::invalid_argument("kkts: initial matrix dimension mismatch");
  ConstraintSet z(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (!(std::abs(w_init(i, j)) >= cfg.omega)) z.insert(i, j);
  WeightMatrix w = solve_all_columns(z, score);
  return KktsState(std::move(z), std::move(w), spec_for(cfg, d));
}

KktsState init_unconstrained(const KktsConfig& cfg, const ScoreConfig& score) {
  cfg.validate();
  const int d = score.dimension();
  ConstraintSet z(d);
  WeightMatrix w = solve_all_columns(z, score);
  return KktsState(std::move(z), std::move(w), spec_for(cfg, d));
}

void removal_phase(KktsState& st, const KktsConfig& cfg, const ScoreConfig& score) {
  const int d = score.dimension();
  const int cap = cfg.max_removal_iterations > 0 ? cfg.max_removal_iterations : d * d;
  int iter = 0;
  while (st.h > cfg.eps) {
    if (++iter > cap) {
      std::ostringstream msg;
      msg << "kkts: removal phase exceeded " << cap << " iterations (h = " << st.h
          << ", |Z| = " << st.Z.size() << ")";
      throw std::runtime_error(msg.str());
    }
    st.absorb_blocked_zeros();
    const WeightedRemovalResult r = path_weighted_removal(st.W, st.Z, st.gradP, score);
    const ColumnPathResult add = path_add_constraint(st.W.col(r.column), r.column, r.row, st.Z, score);
    st.Z.insert(r.row, r.column);
    st.W.col(r.column) = add.w;
    st.refresh();
    ++st.counters.removals;
  }
}

void reduce_phase(KktsState& st, const KktsConfig& cfg, const ScoreConfig& score) {
  if (!cfg.enable_reduce && !cfg.enable_reverse) return;
  const int d = score.dimension();
  int budget = cfg.max_reduce_iterations > 0 ? cfg.max_reduce_iterations : 50 * d * d;
  st.absorb_blocked_zeros();
  while (true) {
    if (--budget < 0) throw std::runtime_error("kkts: reduce phase iteration cap exceeded");
    ++st.counters.reduce_rounds;
    bool changed = false;
    if (cfg.enable_reduce) changed = restore_one(st, cfg, score) || changed;
    if (cfg.enable_reverse) changed = reversal_sweep(st, score, budget) || changed;
    if (!changed) break;
  }
}

KktsResult run_kkts(const WeightMatrix& w_init, const KktsConfig& cfg, const ScoreConfig& score) {
  const auto t0 = std::chrono::steady_clock::now();
  return run_timed(init_from_matrix(w_init, cfg, score), cfg, score, t0);
}

KktsResult run_kkts_unconstrained(const KktsConfig& cfg, const ScoreConfig& score) {
  const auto t0 = std::chrono::steady_clock::now();
  return run_timed(init_unconstrained(cfg, score), cfg, score, t0);
}

KktsResult run_kkts_from_state(KktsState state, const KktsConfig& cfg, const ScoreConfig& score) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  return run_timed(std::move(state), cfg, score, t0);
}

}  // namespace dagkkt
