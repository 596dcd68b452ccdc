#include "cards/preliminary.hpp"

#include <cmath>

namespace cards {

Vector fit_ols(const DesignMatrix& X, const ResponseVector& y) {
  if (X.p() > X.n()) {
    throw Error(ErrorCode::BadArgument, "fit_ols requires p <= n");
  }
  Eigen::BDCSVD<Matrix> svd(X.values, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv[sv.size() - 1] < 1e-10 * sv[0]) {
    throw Error(ErrorCode::SingularGram, "design matrix is numerically rank deficient");
  }
  return svd.solve(y.values);
}

namespace {

/// One weighted-L1 problem: (1/2n)||y - X b||^2 + sum_j v_j |b_j|,
/// cyclic coordinate descent in ascending index order.
void weighted_l1_cd(const Matrix& X, const Vector& y, const Vector& weights, Vector& beta,
                    Vector& residual, const Vector& col_sq_n, const CdConfig& config) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  for (int sweep = 0; sweep < config.max_inner; ++sweep) {
    double max_change = 0.0;
    for (int j = 0; j < p; ++j) {
      const double old = beta[j];
      const double z = X.col(j).dot(residual) / n + col_sq_n[j] * old;
      double next = 0.0;
      if (z > weights[j]) next = (z - weights[j]) / col_sq_n[j];
      else if (z < -weights[j]) next = (z + weights[j]) / col_sq_n[j];
      const double change = next - old;
      if (change != 0.0) {
        residual -= change * X.col(j);
        beta[j] = next;
        max_change = std::max(max_change, std::abs(change));
      }
    }
    if (max_change <= config.tol) return;
  }
  throw Error(ErrorCode::NoConvergence,
              "coordinate descent did not reach tolerance within " +
                  std::to_string(config.max_inner) + " sweeps",
              config.max_inner);
}

double scad_objective(const Matrix& X, const Vector& y, const Vector& beta,
                      const PenaltySpec& spec) {
  const double n = static_cast<double>(X.rows());
  double obj = (y - X * beta).squaredNorm() / (2.0 * n);
  for (Eigen::Index j = 0; j < beta.size(); ++j) obj += penalty_value(spec, beta[j]);
  return obj;
}

}  // namespace

Vector fit_scad_sparse(const DesignMatrix& X, const ResponseVector& y, double lambda_prime,
                       const CdConfig& config, CdDiagnostics* diag) {
  if (lambda_prime < 0.0) throw Error(ErrorCode::BadArgument, "lambda' must be >= 0");
  const Matrix& M = X.values;
  const int n = X.n();
  const int p = X.p();
  const PenaltySpec spec = PenaltySpec::scad(lambda_prime);

  Vector col_sq_n(p);
  for (int j = 0; j < p; ++j) col_sq_n[j] = M.col(j).squaredNorm() / n;

  Vector beta = Vector::Zero(p);
  Vector residual = y.values;
  if (diag != nullptr) {
    diag->objective_trace.clear();
    diag->objective_trace.push_back(scad_objective(M, y.values, beta, spec));
  }

  for (int m = 0; m < config.max_lla; ++m) {
    Vector weights(p);
    for (int j = 0; j < p; ++j) weights[j] = penalty_derivative(spec, std::abs(beta[j]));
    const Vector before = beta;
    weighted_l1_cd(M, y.values, weights, beta, residual, col_sq_n, config);
    if (diag != nullptr) {
      diag->objective_trace.push_back(scad_objective(M, y.values, beta, spec));
      diag->lla_iterations = m + 1;
    }
    if ((beta - before).cwiseAbs().maxCoeff() <= config.tol) break;
  }
  return beta;
}

}  // namespace cards
