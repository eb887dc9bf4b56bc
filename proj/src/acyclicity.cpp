#include "dagkkt/acyclicity.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

namespace dagkkt {

namespace {

void check_dimension(const AdjacencyMatrix& a, const AcyclicitySpec& spec) {
  if (a.dimension() != spec.dimension())
    throw std::invalid_argument("acyclicity: matrix dimension " + std::to_string(a.dimension()) +
                                " does not match spec dimension " +
                                std::to_string(spec.dimension()));
}

void warn_if_large(const Eigen::MatrixXd& a) {
  const double d = static_cast<double>(a.rows());
  if (a.size() > 0 && a.maxCoeff() * d > 1e8)
    std::clog << "warning: acyclicity: max entry * d = " << a.maxCoeff() * d
              << " exceeds 1e8; matrix powers may overflow\n";
}

Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& base, int exponent) {
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(base.rows(), base.cols());
  Eigen::MatrixXd sq = base;
  while (exponent > 0) {
    if (exponent & 1) result = result * sq;
    exponent >>= 1;
    if (exponent > 0) sq = sq * sq;
  }
  return result;
}

// tr((I + A/d)^d) - d with gradient ((I + A/d)^{d-1})^T.
AcyclicityEval evaluate_binomial(const Eigen::MatrixXd& a) {
  const auto d = a.rows();
  const Eigen::MatrixXd base =
      Eigen::MatrixXd::Identity(d, d) + a / static_cast<double>(d);
  Eigen::MatrixXd e = matrix_power(base, static_cast<int>(d) - 1);
  AcyclicityEval out;
  // tr(E * B) = sum_ij E_ij B_ji; the diagonal is 1 + (walk terms) so
  // subtract one entry at a time.
  double value = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) value += e.row(i).dot(base.col(i)) - 1.0;
  out.value = value;
  out.gradient = e.transpose();
  return out;
}

AcyclicityEval evaluate_polynomial(const Eigen::MatrixXd& a, const std::vector<double>& c) {
  const auto d = a.rows();
  const int degree = static_cast<int>(c.size());
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
  // Horner: q = sum_{p=1}^{deg} c_p A^{p-1}, g = sum_{p=1}^{deg} p c_p A^{p-1}.
  Eigen::MatrixXd q = c[degree - 1] * eye;
  Eigen::MatrixXd g = degree * c[degree - 1] * eye;
  for (int p = degree - 1; p >= 1; --p) {
    q = q * a;
    q.diagonal().array() += c[p - 1];
    g = g * a;
    g.diagonal().array() += p * c[p - 1];
  }
  AcyclicityEval out;
  out.value = (a * q).trace();
  out.gradient = g.transpose();
  return out;
}

}  // namespace

AcyclicitySpec::AcyclicitySpec(Kind kind, int dimension, std::vector<double> coefficients)
    : kind_(kind), dimension_(dimension), coefficients_(std::move(coefficients)) {}

AcyclicitySpec AcyclicitySpec::binomial(int dimension) {
  if (dimension < 1) throw std::invalid_argument("acyclicity: dimension must be >= 1");
  std::vector<double> c(dimension);
  // C(d,p)/d^p built incrementally.
  double coeff = 1.0;
  for (int p = 1; p <= dimension; ++p) {
    coeff *= static_cast<double>(dimension - p + 1) / (static_cast<double>(p) * dimension);
    c[p - 1] = coeff;
  }
  return AcyclicitySpec(Kind::Binomial, dimension, std::move(c));
}

AcyclicitySpec AcyclicitySpec::exponential_series(int dimension) {
  if (dimension < 1) throw std::invalid_argument("acyclicity: dimension must be >= 1");
  std::vector<double> c(dimension);
  double coeff = 1.0;
  for (int p = 1; p <= dimension; ++p) {
    coeff /= p;
    c[p - 1] = coeff;
  }
  return AcyclicitySpec(Kind::ExponentialSeries, dimension, std::move(c));
}

AcyclicitySpec AcyclicitySpec::custom(std::vector<double> coefficients) {
  if (coefficients.empty()) throw std::invalid_argument("acyclicity: no coefficients");
  for (double c : coefficients)
    if (!(c > 0.0) || !std::isfinite(c))
      throw std::invalid_argument("acyclicity: coefficients must be finite and > 0");
  const int d = static_cast<int>(coefficients.size());
  return AcyclicitySpec(Kind::CustomCoefficients, d, std::move(coefficients));
}

AdjacencyMatrix::AdjacencyMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols())
    throw std::invalid_argument("adjacency: matrix must be square");
  for (Eigen::Index k = 0; k < entries_.size(); ++k) {
    const double v = entries_.data()[k];
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("adjacency: entries must be finite and nonnegative");
  }
}

AcyclicityEval evaluate_acyclicity(const AdjacencyMatrix& a, const AcyclicitySpec& spec) {
  check_dimension(a, spec);
  warn_if_large(a.matrix());
  if (spec.kind() == AcyclicitySpec::Kind::Binomial) return evaluate_binomial(a.matrix());
  return evaluate_polynomial(a.matrix(), spec.coefficients());
}

double h_value(const AdjacencyMatrix& a, const AcyclicitySpec& spec) {
  return evaluate_acyclicity(a, spec).value;
}

Eigen::MatrixXd h_grad(const AdjacencyMatrix& a, const AcyclicitySpec& spec) {
  return evaluate_acyclicity(a, spec).gradient;
}

bool hadamard_acyclicity(const AdjacencyMatrix& a, const AcyclicitySpec& spec) {
  const auto eval = evaluate_acyclicity(a, spec);
  if (a.dimension() == 0) return true;
  return a.matrix().cwiseProduct(eval.gradient).maxCoeff() <= kHadamardTol;
}

bool has_directed_walk(const AdjacencyMatrix& a, int from, int to, const AcyclicitySpec& spec) {
  if (from == to) throw std::invalid_argument("has_directed_walk: endpoints must differ");
  if (from < 0 || to < 0 || from >= a.dimension() || to >= a.dimension())
    throw std::out_of_range("has_directed_walk: node index out of range");
  return h_grad(a, spec)(to, from) > kWalkTol;
}

bool is_acyclic_support(const WeightMatrix& w, double threshold) {
  const auto d = w.rows();
  std::vector<int> indegree(d, 0);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i)
      if (std::abs(w(i, j)) > threshold) ++indegree[j];
  std::vector<Eigen::Index> ready;
  for (Eigen::Index j = 0; j < d; ++j)
    if (indegree[j] == 0) ready.push_back(j);
  Eigen::Index visited = 0;
  while (!ready.empty()) {
    const auto i = ready.back();
    ready.pop_back();
    ++visited;
    for (Eigen::Index j = 0; j < d; ++j)
      if (std::abs(w(i, j)) > threshold && --indegree[j] == 0) ready.push_back(j);
  }
  return visited == d;
}

}  // namespace dagkkt
