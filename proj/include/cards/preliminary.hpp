#pragma once

#include "cards/penalty.hpp"
#include "cards/types.hpp"

namespace cards {

struct CdConfig {
  double tol = 1e-8;     // max absolute coefficient change per sweep
  int max_inner = 10000; // coordinate-descent passes per weighted problem
  int max_lla = 20;
};

struct CdDiagnostics {
  std::vector<double> objective_trace;  // one entry per LLA iterate
  int lla_iterations = 0;
};

/// Least squares via SVD; throws SingularGram when the smallest singular
/// value of X falls below 1e-10 times the largest.
Vector fit_ols(const DesignMatrix& X, const ResponseVector& y);

/// SCAD-penalized least squares: LLA over weighted-L1 subproblems, each
/// solved by cyclic coordinate descent from a zero start. Deterministic.
Vector fit_scad_sparse(const DesignMatrix& X, const ResponseVector& y, double lambda_prime,
                       const CdConfig& config = {}, CdDiagnostics* diag = nullptr);

}  // namespace cards
