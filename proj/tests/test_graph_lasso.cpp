#include <doctest.h>

#include <cmath>

#include "cards/graph_lasso.hpp"
#include "cards/preliminary.hpp"
#include "support/test_utils.hpp"

using namespace cards;

TEST_CASE("zero weights reduce to least squares on the support") {
  auto eng = testutil::rng(2);
  const int n = 30, p = 5;
  const Matrix X = testutil::random_matrix(eng, n, p);
  const Vector y = testutil::random_vector(eng, n);

  auto prob = WeightedGraphProblem::from_data(X, y, {{0, 1}, {2, 4}}, Vector::Zero(2));
  SolveStats stats;
  const Vector beta = solve_weighted_graph_lasso(prob, {}, &stats);
  const Vector ls = fit_ols(DesignMatrix::from(X), ResponseVector::from(y));
  CHECK((beta - ls).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(stats.converged);

  // restricted support: free coordinates solve the reduced problem, others 0
  auto restricted = WeightedGraphProblem::from_data(X, y, {{0, 1}}, Vector::Zero(1), {}, {0, 1, 3});
  const Vector beta_r = solve_weighted_graph_lasso(restricted, {});
  CHECK(beta_r[2] == 0.0);
  CHECK(beta_r[4] == 0.0);
  Matrix Xs(n, 3);
  Xs.col(0) = X.col(0);
  Xs.col(1) = X.col(1);
  Xs.col(2) = X.col(3);
  const Vector sub = fit_ols(DesignMatrix::from(Xs), ResponseVector::from(y));
  CHECK(std::abs(beta_r[0] - sub[0]) < 1e-6);
  CHECK(std::abs(beta_r[1] - sub[1]) < 1e-6);
  CHECK(std::abs(beta_r[3] - sub[2]) < 1e-6);
}

TEST_CASE("two-point fused problem matches the closed form and a 2-D grid search") {
  auto eng = testutil::rng(12);
  const int n = 16;
  const Matrix X = testutil::orthogonal_design(eng, n, 2);
  Vector beta0(2);
  beta0 << 1.0, 2.0;
  const Vector y = X * beta0 + 0.1 * testutil::random_vector(eng, n);
  const Vector z = X.transpose() * y / n;

  auto objective = [&](const Vector& b, double w) {
    return (y - X * b).squaredNorm() / (2.0 * n) + w * std::abs(b[0] - b[1]);
  };

  // strong fusion: w above half the marginal gap merges to the mean
  const double gap = std::abs(z[0] - z[1]);
  {
    const double w = 0.75 * gap;
    auto prob = WeightedGraphProblem::from_data(X, y, {{0, 1}}, Vector::Constant(1, w));
    AdmmConfig tight;
    tight.tol = 1e-10;
    const Vector beta = solve_weighted_graph_lasso(prob, tight);
    CHECK(beta[0] == doctest::Approx(0.5 * (z[0] + z[1])).epsilon(1e-6));
    CHECK(beta[1] == doctest::Approx(beta[0]).epsilon(1e-8));
  }
  // weak fusion: each coefficient moves toward the other by exactly w
  {
    const double w = 0.2 * gap;
    auto prob = WeightedGraphProblem::from_data(X, y, {{0, 1}}, Vector::Constant(1, w));
    const Vector beta = solve_weighted_graph_lasso(prob, {});
    const double sgn = z[0] > z[1] ? 1.0 : -1.0;
    CHECK(beta[0] == doctest::Approx(z[0] - sgn * w).epsilon(1e-6));
    CHECK(beta[1] == doctest::Approx(z[1] + sgn * w).epsilon(1e-6));
    const Vector brute = testutil::grid_refine([&](const Vector& b) { return objective(b, w); },
                                               beta, 0.5);
    CHECK(objective(beta, w) <= objective(brute, w) + 1e-8);
  }
}

TEST_CASE("random mixed-weight problem beats a grid-refinement oracle") {
  auto eng = testutil::rng(33);
  const int n = 4, p = 3;
  const Matrix X = testutil::random_matrix(eng, n, p);
  const Vector y = testutil::random_vector(eng, n);
  Vector w(3);
  w << 0.12, 0.0, 0.35;
  Vector v(p);
  v << 0.05, 0.0, 0.2;

  auto prob = WeightedGraphProblem::from_data(X, y, {{0, 1}, {0, 2}, {1, 2}}, w, v);
  SolveStats stats;
  const Vector beta = solve_weighted_graph_lasso(prob, {}, &stats);

  auto objective = [&](const Vector& b) {
    double obj = (y - X * b).squaredNorm() / (2.0 * n);
    obj += w[0] * std::abs(b[0] - b[1]) + w[1] * std::abs(b[0] - b[2]) + w[2] * std::abs(b[1] - b[2]);
    for (int j = 0; j < p; ++j) obj += v[j] * std::abs(b[j]);
    return obj;
  };
  const Vector brute = testutil::grid_refine(objective, beta, 1.0);
  CHECK(objective(beta) <= objective(brute) + 1e-6);
  CHECK(stats.kkt_residual <= 1e-5);
}

TEST_CASE("stationarity residual stays small on converged solves") {
  auto eng = testutil::rng(44);
  for (int t = 0; t < 8; ++t) {
    const int n = 40, p = 12;
    const Matrix X = testutil::random_matrix(eng, n, p);
    const Vector y = testutil::random_vector(eng, n);
    std::vector<std::pair<int, int>> pairs;
    for (int j = 0; j + 1 < p; ++j) pairs.emplace_back(j, j + 1);
    Vector w(static_cast<Eigen::Index>(pairs.size()));
    std::uniform_real_distribution<double> unif(0.0, 0.4);
    for (Eigen::Index e = 0; e < w.size(); ++e) w[e] = unif(eng);

    SolveStats stats;
    auto prob = WeightedGraphProblem::from_data(X, y, pairs, w);
    solve_weighted_graph_lasso(prob, {}, &stats);
    CHECK(stats.converged);
    CHECK(stats.kkt_residual <= 1e-5);
  }
}

TEST_CASE("iteration cap raises NoConvergence") {
  auto eng = testutil::rng(50);
  const Matrix X = testutil::random_matrix(eng, 20, 6);
  const Vector y = testutil::random_vector(eng, 20);
  auto prob = WeightedGraphProblem::from_data(X, y, {{0, 1}, {1, 2}, {3, 4}},
                                              Vector::Constant(3, 0.3));
  AdmmConfig cfg;
  cfg.max_iter = 2;
  try {
    solve_weighted_graph_lasso(prob, cfg);
    FAIL("expected NoConvergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoConvergence);
    CHECK(e.detail() == 2);
  }
}

TEST_CASE("reference kernels and production kernels agree") {
  auto eng = testutil::rng(61);
  const int n = 50, p = 20;
  const Matrix X = testutil::random_matrix(eng, n, p);
  Vector beta0 = Vector::Zero(p);
  beta0.head(10).setConstant(-1.0);
  beta0.tail(10).setConstant(1.0);
  const Vector y = X * beta0 + 0.3 * testutil::random_vector(eng, n);

  std::vector<std::pair<int, int>> pairs;
  for (int j = 0; j + 1 < p; ++j) pairs.emplace_back(j, j + 1);
  for (int j = 0; j + 5 < p; j += 2) pairs.emplace_back(j, j + 5);
  Vector w = Vector::Constant(static_cast<Eigen::Index>(pairs.size()), 0.07);

  auto prob = WeightedGraphProblem::from_data(X, y, pairs, w);
  AdmmConfig fast;
  AdmmConfig ref = fast;
  ref.use_reference_kernels = true;
  const Vector a = solve_weighted_graph_lasso(prob, fast);
  const Vector b = solve_weighted_graph_lasso(prob, ref);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);  // identical arithmetic at this size
}
