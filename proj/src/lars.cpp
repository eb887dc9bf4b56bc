#include "dagkkt/lars.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace dagkkt {

std::string to_string(PathEvent::Kind kind) {
  switch (kind) {
    case PathEvent::Kind::JoinActive: return "join";
    case PathEvent::Kind::LeaveActive: return "leave";
    case PathEvent::Kind::TargetReachedZero: return "target-zero";
    case PathEvent::Kind::PenaltyExhausted: return "penalty-exhausted";
    case PathEvent::Kind::CycleEdgeRemoved: return "cycle-edge-removed";
  }
  return "?";
}

void write_event_trace(std::ostream& out, const std::vector<PathEvent>& events) {
  out << "step,kind,row,column,gamma,alpha\n";
  out.precision(17);
  for (std::size_t k = 0; k < events.size(); ++k) {
    const auto& e = events[k];
    out << k << ',' << to_string(e.kind) << ',' << e.row << ',' << e.column << ',' << e.gamma
        << ',' << e.alpha << '\n';
  }
}

std::vector<int> LarsColumnState::active() const {
  std::vector<int> a;
  for (Eigen::Index i = 0; i < sign.size(); ++i)
    if (sign[i] != 0.0) a.push_back(static_cast<int>(i));
  return a;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDenTol = 1e-13;
constexpr double kGammaTie = 1e-14;
constexpr double kRidge = 1e-10;

enum class Direction { Increase, Decrease };

struct Candidate {
  double gamma = kInf;
  int row = -1;
  bool leave = false;
  double join_sign = 0.0;
};

// One column of the weighted homotopy
//   min (1/2n)||X_j - X w||^2 + sum_i (tau + alpha p_i)|w_i|,  w_i = 0 off `allowed`.
class ColumnPath {
 public:
  ColumnPath(const ScoreConfig& score, int j, std::vector<char> allowed, Eigen::VectorXd p)
      : s_(score.gram()), tau_(score.tau()), allowed_(std::move(allowed)), p_(std::move(p)) {
    st_.column = j;
    const auto d = s_.rows();
    st_.w = Eigen::VectorXd::Zero(d);
    st_.g = s_.col(j);
    st_.sign = Eigen::VectorXd::Zero(d);
    dir_ = Eigen::VectorXd::Zero(d);
    c_ = Eigen::VectorXd::Zero(d);
  }

  LarsColumnState& state() { return st_; }
  const Eigen::VectorXd& penalty() const { return p_; }

  void set_active_from_w() {
    for (Eigen::Index i = 0; i < st_.w.size(); ++i)
      st_.sign[i] = st_.w[i] > 0.0 ? 1.0 : (st_.w[i] < 0.0 ? -1.0 : 0.0);
  }

  // Solves the active Gram system with a ridge fallback.
  Eigen::VectorXd solve_active(const std::vector<int>& a, const Eigen::VectorXd& rhs) {
    const auto k = static_cast<Eigen::Index>(a.size());
    Eigen::MatrixXd saa(k, k);
    for (Eigen::Index r = 0; r < k; ++r)
      for (Eigen::Index c = 0; c < k; ++c) saa(r, c) = s_(a[r], a[c]);
    Eigen::LLT<Eigen::MatrixXd> llt(saa);
    if (llt.info() != Eigen::Success) {
      if (!warned_) {
        std::clog << "lars: singular active Gram matrix in column " << st_.column
                  << ", adding ridge " << kRidge << '\n';
        warned_ = true;
      }
      saa.diagonal().array() += kRidge;
      llt.compute(saa);
      if (llt.info() != Eigen::Success)
        throw std::runtime_error("lars: active Gram matrix not positive definite");
    }
    return llt.solve(rhs);
  }

  // Recomputes w_A from the stationarity equations at the current alpha, and g.
  void polish() {
    const auto a = st_.active();
    const auto k = static_cast<Eigen::Index>(a.size());
    Eigen::VectorXd rhs(k);
    for (Eigen::Index r = 0; r < k; ++r)
      rhs[r] = s_(a[r], st_.column) - st_.sign[a[r]] * (tau_ + st_.alpha * p_[a[r]]);
    const Eigen::VectorXd wa = k ? solve_active(a, rhs) : Eigen::VectorXd();
    st_.w.setZero();
    for (Eigen::Index r = 0; r < k; ++r) st_.w[a[r]] = wa[r];
    st_.g = s_.col(st_.column) - s_ * st_.w;
  }

  void direction() {
    const auto a = st_.active();
    const auto k = static_cast<Eigen::Index>(a.size());
    dir_.setZero();
    c_.setZero();
    if (!k) return;
    Eigen::VectorXd rhs(k);
    for (Eigen::Index r = 0; r < k; ++r) rhs[r] = st_.sign[a[r]] * p_[a[r]];
    if (rhs.isZero(0.0)) return;
    const Eigen::VectorXd da = solve_active(a, rhs);
    for (Eigen::Index r = 0; r < k; ++r) {
      dir_[a[r]] = da[r];
      c_.noalias() += da[r] * s_.col(a[r]);
    }
  }

  Candidate next_event(Direction dirn, int skip) const {
    Candidate leave, join;
    const double inc = dirn == Direction::Increase ? 1.0 : -1.0;
    for (Eigen::Index i = 0; i < st_.w.size(); ++i) {
      if (!allowed_[i]) continue;
      if (st_.sign[i] != 0.0) {
        const double move = -inc * dir_[i];
        if (move == 0.0) continue;
        double gamma;
        if (st_.w[i] * st_.sign[i] < 0.0)
          gamma = 0.0;  // crossed zero through round-off
        else if (st_.w[i] * move < 0.0)
          gamma = std::abs(st_.w[i]) / std::abs(move);
        else
          continue;
        if (i == skip && gamma <= kGammaTie) continue;
        if (gamma < leave.gamma) leave = {gamma, static_cast<int>(i), true, 0.0};
      } else {
        const double bound = tau_ + st_.alpha * p_[i];
        // Upper face g_i = +bound, lower face g_i = -bound.
        const double den_up = dirn == Direction::Increase ? c_[i] - p_[i] : p_[i] - c_[i];
        const double den_lo = dirn == Direction::Increase ? -c_[i] - p_[i] : c_[i] + p_[i];
        const struct {
          double den, num, sgn;
        } faces[2] = {{den_up, bound - st_.g[i], 1.0}, {den_lo, bound + st_.g[i], -1.0}};
        for (const auto& f : faces) {
          if (f.den <= kDenTol) continue;
          const double gamma = std::max(f.num, 0.0) / f.den;
          if (i == skip && gamma <= kGammaTie) continue;
          if (gamma < join.gamma) join = {gamma, static_cast<int>(i), false, f.sgn};
        }
      }
    }
    if (leave.row >= 0 && leave.gamma <= join.gamma + kGammaTie * std::max(1.0, join.gamma))
      return leave;
    return join;
  }

  void step(Direction dirn, double gamma) {
    if (gamma == 0.0) return;
    if (dirn == Direction::Increase) {
      st_.w.noalias() -= gamma * dir_;
      st_.g.noalias() += gamma * c_;
      st_.alpha += gamma;
    } else {
      st_.w.noalias() += gamma * dir_;
      st_.g.noalias() -= gamma * c_;
      st_.alpha -= gamma;
    }
  }

  void apply(const Candidate& ev) {
    if (ev.leave) {
      st_.sign[ev.row] = 0.0;
      st_.w[ev.row] = 0.0;
    } else {
      st_.sign[ev.row] = ev.join_sign;
    }
    polish();
    direction();
  }

 private:
  const Eigen::MatrixXd& s_;
  double tau_;
  std::vector<char> allowed_;
  Eigen::VectorXd p_;
  LarsColumnState st_;
  Eigen::VectorXd dir_, c_;
  bool warned_ = false;
};

std::vector<char> allowed_rows(const ConstraintSet& z, int j) {
  std::vector<char> a(z.dimension());
  for (int i = 0; i < z.dimension(); ++i) a[i] = !z.contains(i, j);
  return a;
}

int event_cap(int d) { return 200 * d + 1000; }

void check_column_args(const Eigen::VectorXd& w, int j, int i0, const ConstraintSet& z,
                       const ScoreConfig& score) {
  const int d = score.dimension();
  if (z.dimension() != d || w.size() != d)
    throw std::invalid_argument("lars: dimension mismatch");
  if (j < 0 || j >= d || i0 < 0 || i0 >= d) throw std::out_of_range("lars: index out of range");
  if (i0 == j) throw std::invalid_argument("lars: diagonal entries are always constrained");
}

// Runs the decreasing path until alpha reaches zero.
void run_to_zero(ColumnPath& path, int skip, std::vector<PathEvent>* trace) {
  const int j = path.state().column;
  const int cap = event_cap(static_cast<int>(path.state().w.size()));
  for (int n = 0;; ++n) {
    if (n > cap) throw std::runtime_error("lars: event limit exceeded (cycling path?)");
    const Candidate ev = path.next_event(Direction::Decrease, skip);
    const double alpha = path.state().alpha;
    if (ev.gamma >= alpha) {
      path.step(Direction::Decrease, alpha);
      path.state().alpha = 0.0;
      path.polish();
      if (trace) trace->push_back({PathEvent::Kind::PenaltyExhausted, -1, j, alpha, 0.0});
      return;
    }
    path.step(Direction::Decrease, ev.gamma);
    path.apply(ev);
    skip = ev.row;
    if (trace)
      trace->push_back({ev.leave ? PathEvent::Kind::LeaveActive : PathEvent::Kind::JoinActive,
                        ev.row, j, ev.gamma, path.state().alpha});
  }
}

}  // namespace

Eigen::VectorXd solve_column_lasso(int j, const ConstraintSet& z, const ScoreConfig& score,
                                   std::vector<PathEvent>* trace) {
  const int d = score.dimension();
  if (z.dimension() != d) throw std::invalid_argument("lars: dimension mismatch");
  if (j < 0 || j >= d) throw std::out_of_range("lars: column out of range");
  auto allowed = allowed_rows(z, j);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(d);
  int top = -1;
  for (int i = 0; i < d; ++i) {
    if (!allowed[i]) continue;
    p[i] = 1.0;
    if (top < 0 || std::abs(score.gram()(i, j)) > std::abs(score.gram()(top, j))) top = i;
  }
  if (top < 0 || std::abs(score.gram()(top, j)) <= score.tau()) return Eigen::VectorXd::Zero(d);

  ColumnPath path(score, j, std::move(allowed), std::move(p));
  auto& st = path.state();
  st.alpha = std::abs(st.g[top]) - score.tau();
  st.sign[top] = st.g[top] > 0.0 ? 1.0 : -1.0;
  path.polish();
  path.direction();
  if (trace) trace->push_back({PathEvent::Kind::JoinActive, top, j, 0.0, st.alpha});
  run_to_zero(path, top, trace);
  return st.w;
}

ColumnPathResult path_add_constraint(const Eigen::VectorXd& w_opt, int j, int i0,
                                     const ConstraintSet& z, const ScoreConfig& score) {
  check_column_args(w_opt, j, i0, z, score);
  ColumnPathResult res;
  res.w = w_opt;
  if (z.contains(i0, j)) throw std::invalid_argument("path_add_constraint: pair already in Z");
  if (w_opt[i0] == 0.0) return res;

  const int d = score.dimension();
  Eigen::VectorXd p = Eigen::VectorXd::Zero(d);
  p[i0] = 1.0;
  ColumnPath path(score, j, allowed_rows(z, j), std::move(p));
  auto& st = path.state();
  st.w = w_opt;
  path.set_active_from_w();
  path.polish();
  path.direction();

  int skip = -1;
  const int cap = event_cap(d);
  for (int n = 0;; ++n) {
    if (n > cap) throw std::runtime_error("path_add_constraint: event limit exceeded");
    const Candidate ev = path.next_event(Direction::Increase, skip);
    if (ev.row < 0) throw std::logic_error("path_add_constraint: target never reaches zero");
    path.step(Direction::Increase, ev.gamma);
    path.apply(ev);
    skip = ev.row;
    if (ev.leave && ev.row == i0) {
      res.events.push_back({PathEvent::Kind::TargetReachedZero, i0, j, ev.gamma, st.alpha});
      break;
    }
    res.events.push_back({ev.leave ? PathEvent::Kind::LeaveActive : PathEvent::Kind::JoinActive,
                          ev.row, j, ev.gamma, st.alpha});
  }
  res.alpha_end = st.alpha;
  // With (i0, j) now constrained the penalty on it no longer matters; the
  // remaining active set solves the tau-only problem exactly.
  st.alpha = 0.0;
  path.polish();
  res.w = st.w;
  return res;
}

ColumnPathResult path_relax_constraint(const Eigen::VectorXd& w_opt, int j, int i0,
                                       const ConstraintSet& z, const ScoreConfig& score) {
  check_column_args(w_opt, j, i0, z, score);
  if (!z.contains(i0, j)) throw std::invalid_argument("path_relax_constraint: pair not in Z");
  ColumnPathResult res;
  res.w = w_opt;
  const Eigen::VectorXd g0 = column_neg_grad(w_opt, j, score);
  if (std::abs(g0[i0]) <= score.tau()) return res;

  const int d = score.dimension();
  auto allowed = allowed_rows(z, j);
  allowed[i0] = 1;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(d);
  p[i0] = 1.0;
  ColumnPath path(score, j, std::move(allowed), std::move(p));
  auto& st = path.state();
  st.w = w_opt;
  st.w[i0] = 0.0;
  path.set_active_from_w();
  st.alpha = std::abs(g0[i0]) - score.tau();
  st.sign[i0] = g0[i0] > 0.0 ? 1.0 : -1.0;
  path.polish();
  path.direction();
  res.alpha_end = st.alpha;
  run_to_zero(path, i0, &res.events);
  res.w = st.w;
  return res;
}

WeightedRemovalResult path_weighted_removal(const WeightMatrix& w_opt, const ConstraintSet& z,
                                            const Eigen::MatrixXd& p, const ScoreConfig& score) {
  const int d = score.dimension();
  if (w_opt.rows() != d || w_opt.cols() != d || p.rows() != d || p.cols() != d ||
      z.dimension() != d)
    throw std::invalid_argument("path_weighted_removal: dimension mismatch");

  std::vector<ColumnPath> cols;
  cols.reserve(d);
  std::vector<Candidate> next(d);
  std::vector<int> skip(d, -1);
  for (int j = 0; j < d; ++j) {
    auto allowed = allowed_rows(z, j);
    Eigen::VectorXd pj = p.col(j);
    for (int i = 0; i < d; ++i)
      if (!allowed[i]) pj[i] = 0.0;
    cols.emplace_back(score, j, std::move(allowed), std::move(pj));
    auto& st = cols.back().state();
    st.w = w_opt.col(j);
    cols.back().set_active_from_w();
    cols.back().polish();
    cols.back().direction();
    next[j] = cols.back().next_event(Direction::Increase, -1);
  }

  WeightedRemovalResult res;
  double alpha = 0.0;
  const int cap = event_cap(d) * d;
  for (int n = 0;; ++n) {
    if (n > cap) throw std::runtime_error("path_weighted_removal: event limit exceeded");
    int jstar = -1;
    for (int j = 0; j < d; ++j)
      if (next[j].row >= 0 && (jstar < 0 || next[j].gamma < next[jstar].gamma)) jstar = j;
    if (jstar < 0)
      throw std::logic_error(
          "path_weighted_removal: path exhausted without removing a cycle edge "
          "(no active entry carries positive weight)");
    const Candidate ev = next[jstar];
    const double gamma = std::max(ev.gamma, 0.0);
    alpha += gamma;
    for (int j = 0; j < d; ++j) {
      cols[j].step(Direction::Increase, gamma);
      cols[j].state().alpha = alpha;
      if (j != jstar && next[j].row >= 0) next[j].gamma = std::max(next[j].gamma - gamma, 0.0);
    }
    const bool cycle_edge = ev.leave && w_opt(ev.row, jstar) != 0.0 && p(ev.row, jstar) > 0.0;
    if (cycle_edge) {
      res.events.push_back({PathEvent::Kind::CycleEdgeRemoved, ev.row, jstar, gamma, alpha});
      res.row = ev.row;
      res.column = jstar;
      res.alpha = alpha;
      return res;
    }
    cols[jstar].apply(ev);
    skip[jstar] = ev.row;
    next[jstar] = cols[jstar].next_event(Direction::Increase, skip[jstar]);
    res.events.push_back({ev.leave ? PathEvent::Kind::LeaveActive : PathEvent::Kind::JoinActive,
                          ev.row, jstar, gamma, alpha});
  }
}

double column_kkt_violation(const Eigen::VectorXd& w, int j, const ConstraintSet& z,
                            const ScoreConfig& score) {
  const Eigen::VectorXd g = column_neg_grad(w, j, score);
  const double tau = score.tau();
  double worst = 0.0;
  for (int i = 0; i < score.dimension(); ++i) {
    if (z.contains(i, j)) {
      if (w[i] != 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    if (w[i] != 0.0)
      worst = std::max(worst, std::abs(g[i] - (w[i] > 0.0 ? tau : -tau)));
    else
      worst = std::max(worst, std::abs(g[i]) - tau);
  }
  return worst;
}

}  // namespace dagkkt
