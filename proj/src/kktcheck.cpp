#include "dagkkt/kktcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dagkkt {

std::string to_string(EntryStatus s) {
  switch (s) {
    case EntryStatus::Diagonal: return "diagonal";
    case EntryStatus::FreeOptimal: return "free-optimal";
    case EntryStatus::CycleBlocked: return "cycle-blocked";
    case EntryStatus::Violation: return "violation";
  }
  return "?";
}

KktReport verify_kkt(const WeightMatrix& w, const ScoreConfig& score, const AcyclicitySpec& spec,
                     const KktTolerances& tol) {
  const int d = score.dimension();
  if (w.rows() != d || w.cols() != d) throw std::invalid_argument("verify_kkt: dimension mismatch");
  const double tau = score.tau();
  const AcyclicityEval ev = evaluate_acyclicity(AdjacencyMatrix::abs_of(w), spec);
  const Eigen::MatrixXd& hg = ev.gradient;
  const Eigen::MatrixXd lg = loss_grad(w, score);

  KktReport rep;
  rep.dimension = d;
  rep.h = ev.value;
  rep.feasible = ev.value <= tol.eps;
  rep.status.assign(static_cast<std::size_t>(d) * d, EntryStatus::FreeOptimal);
  auto mark = [&](int i, int j, EntryStatus s) { rep.status[static_cast<std::size_t>(i) * d + j] = s; };

  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (i == j) {
        mark(i, j, EntryStatus::Diagonal);
        continue;
      }
      if (hg(i, j) > tol.walk) {
        if (std::abs(w(i, j)) > tol.stationarity) {
          mark(i, j, EntryStatus::Violation);
          rep.violations.push_back({i, j, std::abs(w(i, j)), "nonzero weight on a cycle"});
        } else {
          mark(i, j, EntryStatus::CycleBlocked);
          rep.lambda = std::max(rep.lambda, std::max(std::abs(lg(i, j)) - tau, 0.0) / hg(i, j));
        }
        continue;
      }
      double v;
      if (w(i, j) != 0.0) {
        v = std::abs(lg(i, j) + (w(i, j) > 0.0 ? tau : -tau));
        rep.max_complementarity = std::max(rep.max_complementarity, v);
      } else {
        v = std::max(std::abs(lg(i, j)) - tau, 0.0);
      }
      rep.max_stationarity = std::max(rep.max_stationarity, v);
      if (v > tol.stationarity) {
        mark(i, j, EntryStatus::Violation);
        rep.violations.push_back({i, j, v, w(i, j) != 0.0 ? "support gradient" : "zero gradient"});
      }
    }
  if (!rep.feasible)
    rep.violations.push_back({-1, -1, rep.h, "infeasible: h above tolerance"});
  rep.pass = rep.violations.empty();
  return rep;
}

std::vector<std::pair<int, int>> compute_P(const WeightMatrix& w, const AcyclicitySpec& spec,
                                           double tol) {
  const Eigen::MatrixXd hg = h_grad(AdjacencyMatrix::abs_of(w), spec);
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < hg.rows(); ++i)
    for (int j = 0; j < hg.cols(); ++j)
      if (i != j && hg(i, j) > tol) out.emplace_back(i, j);
  return out;
}

IrreducibilityReport check_irreducible(const ConstraintSet& z, const WeightMatrix& w,
                                       const AcyclicitySpec& spec, const ScoreConfig& score,
                                       double tol) {
  const Eigen::MatrixXd hg = h_grad(AdjacencyMatrix::abs_of(w), spec);
  const Eigen::MatrixXd lg = loss_grad(w, score);
  IrreducibilityReport rep;
  for (const auto& [i, j] : z.pairs()) {
    if (i == j || hg(i, j) > tol) continue;
    if (std::abs(lg(i, j)) > score.tau()) rep.witnesses.emplace_back(i, j);
  }
  rep.irreducible = rep.witnesses.empty();
  return rep;
}

}  // namespace dagkkt
