#include <doctest.h>

#include "dagkkt/bound_lbfgs.hpp"

#include <cmath>
#include <stdexcept>

using namespace dagkkt;

TEST_CASE("unconstrained quadratic") {
  Eigen::MatrixXd q(3, 3);
  q << 4, 1, 0, 1, 3, 0.5, 0, 0.5, 2;
  const Eigen::VectorXd b(Eigen::Vector3d(1, -2, 3));
  const BoundObjective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = q * x - b;
    return 0.5 * x.dot(q * x) - b.dot(x);
  };
  const double inf = std::numeric_limits<double>::infinity();
  const auto r = minimize_bounded(f, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Constant(3, -inf),
                                  Eigen::VectorXd::Constant(3, inf));
  CHECK(r.stop == BoundLbfgsResult::Stop::ProjectedGradient);
  CHECK((r.x - q.ldlt().solve(b)).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("active lower bounds") {
  // min 0.5||x - c||^2 on x >= 0 is max(c, 0).
  const Eigen::VectorXd c(Eigen::Vector4d(1.5, -2.0, 0.25, -0.1));
  const BoundObjective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = x - c;
    return 0.5 * g.squaredNorm();
  };
  const auto r = minimize_bounded(f, Eigen::VectorXd::Constant(4, 1.0), Eigen::VectorXd::Zero(4),
                                  Eigen::VectorXd::Constant(4, std::numeric_limits<double>::infinity()));
  CHECK((r.x - c.cwiseMax(0.0)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(r.pg_norm <= 1e-8);
}

TEST_CASE("Rosenbrock in a box") {
  const BoundObjective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    const double a = 1 - x[0], b = x[1] - x[0] * x[0];
    g[0] = -2 * a - 400 * x[0] * b;
    g[1] = 200 * b;
    return a * a + 100 * b * b;
  };
  BoundLbfgsOptions opt;
  opt.max_iterations = 2000;
  const auto r = minimize_bounded(f, Eigen::Vector2d(-1.2, 1.0), Eigen::Vector2d(-2, -2),
                                  Eigen::Vector2d(0.8, 2), opt);
  // Constrained optimum sits on x0 = 0.8, x1 = 0.64.
  CHECK(r.x[0] == doctest::Approx(0.8).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(0.64).epsilon(1e-5));
}

TEST_CASE("iteration cap and relative decrease stop") {
  const BoundObjective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = 2.0 * x;
    g[0] = 4.0 * x[0] * x[0] * x[0];
    return std::pow(x[0], 4) + x.tail(x.size() - 1).squaredNorm();
  };
  const double inf = std::numeric_limits<double>::infinity();
  BoundLbfgsOptions opt;
  opt.max_iterations = 3;
  auto r = minimize_bounded(f, Eigen::VectorXd::Constant(3, 1.0), Eigen::VectorXd::Constant(3, -inf),
                            Eigen::VectorXd::Constant(3, inf), opt);
  CHECK(r.stop == BoundLbfgsResult::Stop::MaxIterations);
  CHECK(r.iterations == 3);
  opt.max_iterations = 500;
  opt.f_rel_tol = 1e-3;
  r = minimize_bounded(f, Eigen::VectorXd::Constant(3, 1.0), Eigen::VectorXd::Constant(3, -inf),
                       Eigen::VectorXd::Constant(3, inf), opt);
  CHECK(r.stop == BoundLbfgsResult::Stop::RelativeDecrease);
}

TEST_CASE("bad inputs") {
  const BoundObjective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = x;
    return std::log(x[0]);
  };
  CHECK_THROWS_AS(minimize_bounded(f, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(2),
                                   Eigen::VectorXd::Zero(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(minimize_bounded(f, Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, -2.0),
                                   Eigen::VectorXd::Zero(1)),
                  std::runtime_error);
  CHECK(to_string(BoundLbfgsResult::Stop::LineSearch) == "line-search");
}
