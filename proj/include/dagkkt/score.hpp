#pragma once

#include "dagkkt/acyclicity.hpp"

namespace dagkkt {

inline constexpr double kDefaultTau = 0.1;

/// Least-squares loss (1/2n)||X - XW||_F^2 plus tau*||W||_1, evaluated from
/// the cached Gram matrix S = X^T X / n. Immutable after construction.
class ScoreConfig {
 public:
  ScoreConfig(Eigen::MatrixXd samples, double tau = kDefaultTau);

  int dimension() const { return static_cast<int>(gram_.rows()); }
  int sample_count() const { return n_; }
  double tau() const { return tau_; }
  const Eigen::MatrixXd& samples() const { return samples_; }
  const Eigen::MatrixXd& gram() const { return gram_; }

  /// Same data, different l1 weight; shares nothing mutable.
  ScoreConfig with_tau(double tau) const;

 private:
  Eigen::MatrixXd samples_;
  Eigen::MatrixXd gram_;
  int n_;
  double tau_;
};

double loss(const WeightMatrix& w, const ScoreConfig& cfg);
/// Gradient of the loss: -(1/n) X^T (X - XW) = S W - S.
Eigen::MatrixXd loss_grad(const WeightMatrix& w, const ScoreConfig& cfg);
/// loss + tau * sum_ij |W_ij|.
double score(const WeightMatrix& w, const ScoreConfig& cfg);

/// Per-column pieces; loss(W) = sum_j column_loss(W.col(j), j).
double column_loss(const Eigen::VectorXd& w_col, int j, const ScoreConfig& cfg);
double column_score(const Eigen::VectorXd& w_col, int j, const ScoreConfig& cfg);
/// Negative loss gradient of column j: S_{.j} - S w.
Eigen::VectorXd column_neg_grad(const Eigen::VectorXd& w_col, int j, const ScoreConfig& cfg);

}  // namespace dagkkt
