#pragma once

#include <Eigen/Dense>

#include <vector>

namespace dagkkt {

using WeightMatrix = Eigen::MatrixXd;

/// Tolerance for deciding that a gradient entry of h (a weighted walk count)
/// is zero. Structural zeros come out of the power iteration as exact zeros.
inline constexpr double kWalkTol = 1e-12;
inline constexpr double kHadamardTol = 1e-12;

/// Polynomial family P(A) = sum_p c_p A^p with c_p > 0 for p = 1..d, defining
/// h(A) = sum_p c_p tr(A^p).
class AcyclicitySpec {
 public:
  enum class Kind { Binomial, ExponentialSeries, CustomCoefficients };

  /// c_p = C(d,p) / d^p, i.e. h(A) = tr((I + A/d)^d) - d.
  static AcyclicitySpec binomial(int dimension);
  /// c_p = 1/p!, truncated at degree d.
  static AcyclicitySpec exponential_series(int dimension);
  /// coefficients[p-1] = c_p for p = 1..d; all must be > 0.
  static AcyclicitySpec custom(std::vector<double> coefficients);

  Kind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  /// c_1..c_d, materialized for every kind.
  const std::vector<double>& coefficients() const { return coefficients_; }

 private:
  AcyclicitySpec(Kind kind, int dimension, std::vector<double> coefficients);

  Kind kind_;
  int dimension_;
  std::vector<double> coefficients_;
};

/// Nonnegative weighted adjacency matrix. Construction rejects negative or
/// non-finite entries and non-square shapes.
class AdjacencyMatrix {
 public:
  explicit AdjacencyMatrix(Eigen::MatrixXd entries);

  static AdjacencyMatrix abs_of(const WeightMatrix& w) { return AdjacencyMatrix(w.cwiseAbs()); }
  static AdjacencyMatrix square_of(const WeightMatrix& w) {
    return AdjacencyMatrix(w.cwiseProduct(w));
  }

  const Eigen::MatrixXd& matrix() const { return entries_; }
  int dimension() const { return static_cast<int>(entries_.rows()); }

 private:
  Eigen::MatrixXd entries_;
};

struct AcyclicityEval {
  double value = 0.0;
  Eigen::MatrixXd gradient;
};

/// h(A) and its matrix gradient sum_p p c_p (A^{p-1})^T in one pass.
AcyclicityEval evaluate_acyclicity(const AdjacencyMatrix& a, const AcyclicitySpec& spec);

double h_value(const AdjacencyMatrix& a, const AcyclicitySpec& spec);
Eigen::MatrixXd h_grad(const AdjacencyMatrix& a, const AcyclicitySpec& spec);

/// True iff max_ij A_ij (grad h(A))_ij <= kHadamardTol.
bool hadamard_acyclicity(const AdjacencyMatrix& a, const AcyclicitySpec& spec);

/// True iff there is a directed walk from node `from` to node `to`, read off
/// the gradient entry (grad h(A))_{to, from}.
bool has_directed_walk(const AdjacencyMatrix& a, int from, int to, const AcyclicitySpec& spec);

/// Topological-sort test on the digraph {(i,j) : |W_ij| > threshold}.
bool is_acyclic_support(const WeightMatrix& w, double threshold = 0.0);

}  // namespace dagkkt
