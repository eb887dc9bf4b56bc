#include "dagkkt/score.hpp"

#include <stdexcept>

namespace dagkkt {

namespace {

void check_shape(const WeightMatrix& w, const ScoreConfig& cfg) {
  if (w.rows() != cfg.dimension() || w.cols() != cfg.dimension())
    throw std::invalid_argument("score: weight matrix dimension mismatch");
}

}  // namespace

ScoreConfig::ScoreConfig(Eigen::MatrixXd samples, double tau)
    : samples_(std::move(samples)), n_(static_cast<int>(samples_.rows())), tau_(tau) {
  if (n_ < 1) throw std::invalid_argument("score: need at least one sample");
  if (!(tau >= 0.0)) throw std::invalid_argument("score: tau must be >= 0");
  gram_.noalias() = samples_.transpose() * samples_;
  gram_ /= static_cast<double>(n_);
  // Exact symmetry, so column and row reads agree bit for bit.
  gram_ = (0.5 * (gram_ + gram_.transpose())).eval();
}

ScoreConfig ScoreConfig::with_tau(double tau) const {
  ScoreConfig out = *this;
  if (!(tau >= 0.0)) throw std::invalid_argument("score: tau must be >= 0");
  out.tau_ = tau;
  return out;
}

double column_loss(const Eigen::VectorXd& w_col, int j, const ScoreConfig& cfg) {
  const auto& s = cfg.gram();
  return 0.5 * (s(j, j) - 2.0 * s.col(j).dot(w_col) + w_col.dot(s * w_col));
}

double column_score(const Eigen::VectorXd& w_col, int j, const ScoreConfig& cfg) {
  return column_loss(w_col, j, cfg) + cfg.tau() * w_col.lpNorm<1>();
}

Eigen::VectorXd column_neg_grad(const Eigen::VectorXd& w_col, int j, const ScoreConfig& cfg) {
  return cfg.gram().col(j) - cfg.gram() * w_col;
}

double loss(const WeightMatrix& w, const ScoreConfig& cfg) {
  check_shape(w, cfg);
  double total = 0.0;
  for (int j = 0; j < cfg.dimension(); ++j) total += column_loss(w.col(j), j, cfg);
  return total;
}

Eigen::MatrixXd loss_grad(const WeightMatrix& w, const ScoreConfig& cfg) {
  check_shape(w, cfg);
  Eigen::MatrixXd g = cfg.gram() * w;
  g -= cfg.gram();
  return g;
}

double score(const WeightMatrix& w, const ScoreConfig& cfg) {
  return loss(w, cfg) + cfg.tau() * w.cwiseAbs().sum();
}

}  // namespace dagkkt
