#include "cards/graph_lasso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cards {

QuadraticForm QuadraticForm::least_squares(const Matrix& X, const Vector& y) {
  const double n = static_cast<double>(X.rows());
  QuadraticForm f;
  f.Q = X.transpose() * X / n;
  f.q = X.transpose() * y / n;
  f.c0 = y.squaredNorm() / (2.0 * n);
  return f;
}

double QuadraticForm::value(const Vector& beta) const {
  return 0.5 * beta.dot(Q * beta) - q.dot(beta) + c0;
}

WeightedGraphProblem WeightedGraphProblem::from_data(const Matrix& X, const Vector& y,
                                                     std::vector<std::pair<int, int>> pairs,
                                                     Vector pair_weights, Vector coef_weights,
                                                     std::vector<int> support) {
  WeightedGraphProblem prob;
  prob.quad = QuadraticForm::least_squares(X, y);
  prob.pairs = std::move(pairs);
  prob.pair_weights = std::move(pair_weights);
  prob.coef_weights = std::move(coef_weights);
  prob.support = std::move(support);
  return prob;
}

namespace {

void validate(const WeightedGraphProblem& prob) {
  const int p = prob.dim();
  if (prob.pair_weights.size() != static_cast<Eigen::Index>(prob.pairs.size())) {
    throw Error(ErrorCode::BadArgument, "pair weight count mismatch");
  }
  if (prob.pair_weights.size() > 0 && (!prob.pair_weights.allFinite() || prob.pair_weights.minCoeff() < 0.0)) {
    throw Error(ErrorCode::BadArgument, "pair weights must be finite and >= 0");
  }
  if (prob.coef_weights.size() != 0 && prob.coef_weights.size() != p) {
    throw Error(ErrorCode::BadArgument, "coef weight vector must be empty or length p");
  }
  if (prob.coef_weights.size() > 0 && (!prob.coef_weights.allFinite() || prob.coef_weights.minCoeff() < 0.0)) {
    throw Error(ErrorCode::BadArgument, "coef weights must be finite and >= 0");
  }
  for (const auto& [i, j] : prob.pairs) {
    if (i < 0 || j < 0 || i >= p || j >= p || i == j) {
      throw Error(ErrorCode::BadArgument, "pair index out of range");
    }
  }
}

}  // namespace

Vector solve_weighted_graph_lasso(const WeightedGraphProblem& prob, const AdmmConfig& config,
                                  SolveStats* stats, AdmmState* state) {
  validate(prob);
  const int p = prob.dim();

  // Support reduction: inner index <-> outer coordinate.
  std::vector<int> outer;
  if (prob.support.empty()) {
    outer.resize(static_cast<size_t>(p));
    std::iota(outer.begin(), outer.end(), 0);
  } else {
    outer = prob.support;
    std::sort(outer.begin(), outer.end());
    outer.erase(std::unique(outer.begin(), outer.end()), outer.end());
  }
  const int ps = static_cast<int>(outer.size());
  std::vector<int> inner(static_cast<size_t>(p), -1);
  for (int k = 0; k < ps; ++k) inner[outer[static_cast<size_t>(k)]] = k;

  Matrix Q(ps, ps);
  Vector q(ps);
  for (int a = 0; a < ps; ++a) {
    q[a] = prob.quad.q[outer[a]];
    for (int b = 0; b < ps; ++b) Q(a, b) = prob.quad.Q(outer[a], outer[b]);
  }

  std::vector<std::pair<int, int>> edges;
  edges.reserve(prob.pairs.size());
  for (const auto& [i, j] : prob.pairs) {
    if (inner[i] < 0 || inner[j] < 0) {
      throw Error(ErrorCode::BadArgument, "penalized pair outside the restricted support");
    }
    edges.emplace_back(inner[i], inner[j]);
  }
  const auto es = kernels::EdgeSet::build(ps, edges);
  const int E = es.edge_count();

  const bool sparse_block = prob.coef_weights.size() > 0;
  std::vector<int> coord_idx;
  Vector coord_w;
  if (sparse_block) {
    coord_idx.resize(static_cast<size_t>(ps));
    std::iota(coord_idx.begin(), coord_idx.end(), 0);
    coord_w.resize(ps);
    for (int k = 0; k < ps; ++k) coord_w[k] = prob.coef_weights[outer[k]];
  }
  const int C = static_cast<int>(coord_idx.size());
  const int m = E + C;

  auto scatter_back = [&](const Vector& b) {
    Vector full = Vector::Zero(p);
    for (int k = 0; k < ps; ++k) full[outer[k]] = b[k];
    return full;
  };

  // No auxiliaries: plain quadratic minimization.
  if (m == 0) {
    Eigen::LDLT<Matrix> ldlt(Q);
    Vector beta = ldlt.solve(q);
    if (ldlt.info() != Eigen::Success || !beta.allFinite() ||
        (Q * beta - q).cwiseAbs().maxCoeff() > 1e-8 * (1.0 + q.cwiseAbs().maxCoeff())) {
      throw Error(ErrorCode::SingularGram, "unpenalized normal equations are singular");
    }
    if (stats != nullptr) *stats = SolveStats{0, 0.0, 0.0, 0.0, true};
    if (state != nullptr) {
      state->beta = beta;
      state->initialized = true;
    }
    return scatter_back(beta);
  }

  Vector pair_w(E);
  for (int e = 0; e < E; ++e) pair_w[e] = prob.pair_weights[e];

  Vector beta = Vector::Zero(ps);
  Vector z_edge = Vector::Zero(E), u_edge = Vector::Zero(E);
  Vector z_coord = Vector::Zero(C), u_coord = Vector::Zero(C);
  double rho = config.rho;
  if (state != nullptr && state->initialized && state->z_edge.size() == E &&
      state->z_coord.size() == C && state->beta.size() == ps) {
    beta = state->beta;
    z_edge = state->z_edge;
    u_edge = state->u_edge;
    z_coord = state->z_coord;
    u_coord = state->u_coord;
    rho = state->rho;
  }

  // DtD = edge Laplacian (+ identity on the coordinate block).
  Matrix DtD = Matrix::Zero(ps, ps);
  for (int e = 0; e < E; ++e) {
    const int i = es.tail[e], j = es.head[e];
    DtD(i, i) += 1.0;
    DtD(j, j) += 1.0;
    DtD(i, j) -= 1.0;
    DtD(j, i) -= 1.0;
  }
  for (int k = 0; k < C; ++k) DtD(coord_idx[k], coord_idx[k]) += 1.0;

  Eigen::LDLT<Matrix> ldlt;
  auto refactor = [&]() {
    ldlt.compute(Q + rho * DtD);
    if (ldlt.info() != Eigen::Success) {
      throw Error(ErrorCode::SingularGram, "ADMM system factorization failed");
    }
  };
  refactor();

  Vector rhs(ps), div(ps), scratch_e(E), rprim_e(E), zdiff_e(E);
  Vector scratch_c(C), rprim_c(C), zdiff_c(C);
  const double stop = config.tol * std::sqrt(static_cast<double>(m));
  const bool use_ref = config.use_reference_kernels;

  double r_norm = 0.0, s_norm = 0.0;
  bool converged = false;
  int it = 0;
  for (; it < config.max_iter; ++it) {
    // beta-step
    for (int e = 0; e < E; ++e) scratch_e[e] = z_edge[e] - u_edge[e];
    if (use_ref) {
      kernels::ref::edge_divergence(es, scratch_e.data(), div.data());
    } else {
      kernels::edge_divergence(es, scratch_e.data(), div.data());
    }
    rhs = q + rho * div;
    for (int k = 0; k < C; ++k) rhs[coord_idx[k]] += rho * (z_coord[k] - u_coord[k]);
    beta = ldlt.solve(rhs);

    // prox-step on auxiliaries
    if (use_ref) {
      kernels::ref::edge_prox(es, beta.data(), pair_w.data(), rho, z_edge.data(), u_edge.data(),
                              rprim_e.data(), zdiff_e.data());
      kernels::ref::coord_prox(coord_idx, beta.data(), coord_w.data(), rho, z_coord.data(),
                               u_coord.data(), rprim_c.data(), zdiff_c.data());
    } else {
      kernels::edge_prox(es, beta.data(), pair_w.data(), rho, z_edge.data(), u_edge.data(),
                         rprim_e.data(), zdiff_e.data());
      kernels::coord_prox(coord_idx, beta.data(), coord_w.data(), rho, z_coord.data(),
                          u_coord.data(), rprim_c.data(), zdiff_c.data());
    }

    // residuals
    double r_sq;
    if (use_ref) {
      r_sq = kernels::ref::sum_squares(rprim_e.data(), E) + kernels::ref::sum_squares(rprim_c.data(), C);
      kernels::ref::edge_divergence(es, zdiff_e.data(), div.data());
    } else {
      r_sq = kernels::sum_squares(rprim_e.data(), E) + kernels::sum_squares(rprim_c.data(), C);
      kernels::edge_divergence(es, zdiff_e.data(), div.data());
    }
    for (int k = 0; k < C; ++k) div[coord_idx[k]] += zdiff_c[k];
    const double s_sq = use_ref ? kernels::ref::sum_squares(div.data(), ps)
                                : kernels::sum_squares(div.data(), ps);
    r_norm = std::sqrt(r_sq);
    s_norm = rho * std::sqrt(s_sq);

    if (r_norm <= stop && s_norm <= stop) {
      converged = true;
      ++it;
      break;
    }

    // residual balancing
    if ((it + 1) % 10 == 0) {
      if (r_norm > 10.0 * s_norm && rho < 1e6) {
        rho *= 2.0;
        u_edge *= 0.5;
        u_coord *= 0.5;
        refactor();
      } else if (s_norm > 10.0 * r_norm && rho > 1e-6) {
        rho *= 0.5;
        u_edge *= 2.0;
        u_coord *= 2.0;
        refactor();
      }
    }
  }

  if (!converged) {
    throw Error(ErrorCode::NoConvergence,
                "ADMM did not converge within " + std::to_string(config.max_iter) + " iterations",
                config.max_iter);
  }

  if (stats != nullptr) {
    stats->iterations = it;
    stats->primal_residual = r_norm;
    stats->dual_residual = s_norm;
    stats->converged = true;
    // Stationarity residual: gamma = rho*u is a valid subgradient of the
    // auxiliary terms at z, so || Q b - q + D' (rho u) ||_inf bounds the
    // optimality gap up to the primal mismatch between D b and z.
    for (int e = 0; e < E; ++e) scratch_e[e] = rho * u_edge[e];
    kernels::ref::edge_divergence(es, scratch_e.data(), div.data());
    Vector station = Q * beta - q + div;
    for (int k = 0; k < C; ++k) station[coord_idx[k]] += rho * u_coord[k];
    stats->kkt_residual = station.cwiseAbs().maxCoeff();
  }
  if (state != nullptr) {
    state->beta = beta;
    state->z_edge = z_edge;
    state->u_edge = u_edge;
    state->z_coord = z_coord;
    state->u_coord = u_coord;
    state->rho = rho;
    state->initialized = true;
  }
  return scatter_back(beta);
}

}  // namespace cards
