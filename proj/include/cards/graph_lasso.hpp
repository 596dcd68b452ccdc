#pragma once

#include <optional>

#include "cards/kernels.hpp"
#include "cards/types.hpp"

namespace cards {

/// (1/2) b'Qb - q'b + c0. Built from regression data as Q = X'X/n,
/// q = X'y/n, c0 = y'y/(2n), so it equals (1/2n)||y - Xb||^2.
struct QuadraticForm {
  Matrix Q;
  Vector q;
  double c0 = 0.0;

  static QuadraticForm least_squares(const Matrix& X, const Vector& y);
  double value(const Vector& beta) const;
};

/// Convex inner problem of one LLA step:
///   (1/2) b'Qb - q'b + sum_e w_e |b_i - b_j| + sum_j v_j |b_j|
/// with coordinates outside `support` fixed at zero. `coef_weights` empty
/// means no coordinate penalty block at all.
struct WeightedGraphProblem {
  QuadraticForm quad;
  std::vector<std::pair<int, int>> pairs;
  Vector pair_weights;
  Vector coef_weights;            // size p or empty
  std::vector<int> support;       // empty = all coordinates free

  int dim() const { return static_cast<int>(quad.q.size()); }

  static WeightedGraphProblem from_data(const Matrix& X, const Vector& y,
                                        std::vector<std::pair<int, int>> pairs,
                                        Vector pair_weights, Vector coef_weights = {},
                                        std::vector<int> support = {});
};

struct AdmmConfig {
  double tol = 1e-7;   // scaled by sqrt(#auxiliary constraints)
  int max_iter = 20000;
  double rho = 1.0;
  bool use_reference_kernels = false;  // serial reference path, for testing
};

/// Warm-start state reused across LLA iterations of the same graph.
struct AdmmState {
  Vector beta;  // support-reduced coordinates
  Vector z_edge, u_edge, z_coord, u_coord;
  double rho = 0.0;
  bool initialized = false;
};

/// ADMM with one auxiliary per penalized pair and per coordinate-penalty
/// entry. Deterministic; result is bitwise independent of thread count.
/// Throws NoConvergence after config.max_iter iterations.
Vector solve_weighted_graph_lasso(const WeightedGraphProblem& prob, const AdmmConfig& config,
                                  SolveStats* stats = nullptr, AdmmState* state = nullptr);

}  // namespace cards
