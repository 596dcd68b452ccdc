#include "cards/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cards/preliminary.hpp"
#include "cards/segmentation.hpp"

namespace cards {

double default_extract_tol(const Vector& beta) {
  const double scale = beta.size() > 0 ? beta.cwiseAbs().maxCoeff() : 0.0;
  return 1e-4 * std::max(1.0, scale);
}

Partition extract_partition(const Vector& beta_hat, double tol, bool with_zero_group) {
  if (!(tol > 0.0)) throw Error(ErrorCode::BadArgument, "extraction tolerance must be > 0");
  const int p = static_cast<int>(beta_hat.size());
  Partition part;
  std::vector<int> active;
  active.reserve(static_cast<size_t>(p));
  for (int j = 0; j < p; ++j) {
    if (with_zero_group && std::abs(beta_hat[j]) <= tol) {
      part.zero_group.push_back(j);
    } else {
      active.push_back(j);
    }
  }
  std::stable_sort(active.begin(), active.end(),
                   [&](int a, int b) { return beta_hat[a] < beta_hat[b]; });
  std::vector<int> current;
  for (size_t k = 0; k < active.size(); ++k) {
    if (!current.empty() && beta_hat[active[k]] - beta_hat[current.back()] > tol) {
      std::sort(current.begin(), current.end());
      part.groups.push_back(std::move(current));
      current.clear();
    }
    current.push_back(active[k]);
  }
  if (!current.empty()) {
    std::sort(current.begin(), current.end());
    part.groups.push_back(std::move(current));
  }
  return part;
}

namespace {

double spec_value(const PenaltySpec& spec, double t) { return penalty_value(spec, t); }

double penalized_objective(const QuadraticForm& quad,
                           const std::vector<std::pair<int, int>>& pairs,
                           const std::vector<PairTier>& tiers, const PenaltySpec& spec1,
                           const PenaltySpec& spec2, const std::optional<PenaltySpec>& sparsity,
                           const std::vector<int>& support, const Vector& beta) {
  double obj = quad.value(beta);
  for (size_t e = 0; e < pairs.size(); ++e) {
    const auto& spec = tiers[e] == PairTier::Between ? spec1 : spec2;
    obj += spec_value(spec, beta[pairs[e].first] - beta[pairs[e].second]);
  }
  if (sparsity.has_value()) {
    if (support.empty()) {
      for (Eigen::Index j = 0; j < beta.size(); ++j) obj += spec_value(*sparsity, beta[j]);
    } else {
      for (int j : support) obj += spec_value(*sparsity, beta[j]);
    }
  }
  return obj;
}

}  // namespace

FitResult lla_solve_quad(const QuadraticForm& quad,
                         const std::vector<std::pair<int, int>>& pairs,
                         const std::vector<PairTier>& tiers, const PenaltySpec& spec1,
                         const PenaltySpec& spec2, const std::optional<PenaltySpec>& sparsity,
                         const Vector& initial, const SolverConfig& config,
                         const std::vector<int>& support) {
  if (pairs.size() != tiers.size()) {
    throw Error(ErrorCode::BadArgument, "pair/tier count mismatch");
  }
  const int p = static_cast<int>(quad.q.size());
  if (initial.size() != p) {
    throw Error(ErrorCode::BadArgument, "initial estimate has wrong length");
  }

  WeightedGraphProblem prob;
  prob.quad = quad;
  prob.pairs = pairs;
  prob.pair_weights = Vector::Zero(static_cast<Eigen::Index>(pairs.size()));
  prob.support = support;
  if (sparsity.has_value()) prob.coef_weights = Vector::Zero(p);

  std::vector<int> supp = support;
  if (supp.empty()) {
    supp.resize(static_cast<size_t>(p));
    std::iota(supp.begin(), supp.end(), 0);
  } else {
    std::sort(supp.begin(), supp.end());
    supp.erase(std::unique(supp.begin(), supp.end()), supp.end());
  }

  Vector beta = Vector::Zero(p);
  for (int j : supp) beta[j] = initial[j];

  auto weights_at = [&](const Vector& b, Vector& pw, Vector& cw) {
    for (size_t e = 0; e < pairs.size(); ++e) {
      const auto& spec = tiers[e] == PairTier::Between ? spec1 : spec2;
      pw[static_cast<Eigen::Index>(e)] =
          penalty_derivative(spec, std::abs(b[pairs[e].first] - b[pairs[e].second]));
    }
    if (sparsity.has_value()) {
      cw.setZero();
      for (int j : supp) cw[j] = penalty_derivative(*sparsity, std::abs(b[j]));
    }
  };

  AdmmConfig admm_cfg;
  admm_cfg.tol = config.admm_tol;
  admm_cfg.max_iter = config.max_admm;
  admm_cfg.rho = config.rho;
  admm_cfg.use_reference_kernels = config.use_reference_kernels;

  // Warm-started ADMM state; the first subproblem starts at the preliminary.
  AdmmState state;
  state.beta.resize(static_cast<Eigen::Index>(supp.size()));
  for (size_t k = 0; k < supp.size(); ++k) state.beta[static_cast<Eigen::Index>(k)] = beta[supp[k]];
  state.z_edge.resize(static_cast<Eigen::Index>(pairs.size()));
  for (size_t e = 0; e < pairs.size(); ++e) {
    state.z_edge[static_cast<Eigen::Index>(e)] = beta[pairs[e].first] - beta[pairs[e].second];
  }
  state.u_edge = Vector::Zero(static_cast<Eigen::Index>(pairs.size()));
  if (sparsity.has_value()) {
    state.z_coord = state.beta;
    state.u_coord = Vector::Zero(state.beta.size());
  }
  state.rho = config.rho;
  state.initialized = true;

  FitResult out;
  out.objective_trace.push_back(
      penalized_objective(quad, pairs, tiers, spec1, spec2, sparsity, supp, beta));

  Vector pw(static_cast<Eigen::Index>(pairs.size()));
  Vector cw = sparsity.has_value() ? Vector::Zero(p) : Vector();
  Vector pw_next(static_cast<Eigen::Index>(pairs.size()));
  Vector cw_next = sparsity.has_value() ? Vector::Zero(p) : Vector();

  weights_at(beta, pw, cw);
  bool converged = false;
  int iterations = 0;
  for (int m = 0; m < config.max_lla; ++m) {
    prob.pair_weights = pw;
    if (sparsity.has_value()) prob.coef_weights = cw;

    SolveStats stats;
    const Vector before = beta;
    beta = solve_weighted_graph_lasso(prob, admm_cfg, &stats, &state);
    iterations = m + 1;
    out.inner_stats.push_back(stats);
    out.objective_trace.push_back(
        penalized_objective(quad, pairs, tiers, spec1, spec2, sparsity, supp, beta));
    if (config.record_iterates) out.iterates.push_back(beta);

    const double change = (beta - before).cwiseAbs().maxCoeff();
    weights_at(beta, pw_next, cw_next);
    const bool weights_fixed = (pw_next.array() == pw.array()).all() &&
                               (!sparsity.has_value() || (cw_next.array() == cw.array()).all());
    if (change <= config.lla_tol || weights_fixed) {
      converged = true;
      break;
    }
    pw.swap(pw_next);
    if (sparsity.has_value()) cw.swap(cw_next);
  }

  out.solver_coefficients = beta;
  out.coefficients = beta;
  out.objective = out.objective_trace.back();
  out.iterations = iterations;
  out.converged = converged;
  return out;
}

FitResult lla_solve(const Matrix& X, const Vector& y, const PairGraph& graph,
                    const PenaltySpec& spec1, const PenaltySpec& spec2,
                    const std::optional<PenaltySpec>& sparsity, const Vector& initial,
                    const SolverConfig& config, const std::vector<int>& support) {
  std::vector<std::pair<int, int>> pairs;
  std::vector<PairTier> tiers;
  pairs.reserve(graph.pairs.size());
  tiers.reserve(graph.pairs.size());
  for (const auto& pr : graph.pairs) {
    pairs.emplace_back(pr.i, pr.j);
    tiers.push_back(pr.tier);
  }
  return lla_solve_quad(QuadraticForm::least_squares(X, y), pairs, tiers, spec1, spec2, sparsity,
                        initial, config, support);
}

namespace {

/// Centering/standardization context shared by the fit entry points.
struct Prepared {
  Matrix X;
  Vector y;
  Vector scale;  // raw beta = scale .* solver beta
  Vector xbar;
  double ybar = 0.0;
  bool standardized = false;
  bool centered = false;

  Vector to_solver(const Vector& raw) const {
    return standardized ? Vector(raw.cwiseQuotient(scale)) : raw;
  }
  Vector to_raw(const Vector& b) const { return standardized ? Vector(scale.cwiseProduct(b)) : b; }
};

Prepared prepare(const DesignMatrix& X, const ResponseVector& y, const SolverConfig& config) {
  if (y.values.size() != X.n()) {
    throw Error(ErrorCode::BadArgument, "response length does not match design rows");
  }
  Prepared prep;
  prep.X = X.values;
  prep.y = y.values;
  if (config.center) {
    prep.xbar = prep.X.colwise().mean();
    prep.ybar = prep.y.mean();
    prep.X.rowwise() -= prep.xbar.transpose();
    prep.y.array() -= prep.ybar;
    prep.centered = true;
  }
  if (config.standardize) {
    DesignMatrix tmp;
    tmp.values = std::move(prep.X);
    DesignMatrix std = standardize(tmp);
    prep.X = std::move(std.values);
    prep.scale = std::move(std.scale);
    prep.standardized = true;
  }
  return prep;
}

void finalize(FitResult& fit, const Prepared& prep, const SolverConfig& config,
              bool with_zero_group) {
  fit.coefficients = prep.to_raw(fit.solver_coefficients);
  fit.intercept = prep.centered ? prep.ybar - prep.xbar.dot(fit.coefficients) : 0.0;
  const double tol =
      config.extract_tol > 0.0 ? config.extract_tol : default_extract_tol(fit.solver_coefficients);
  fit.partition = extract_partition(fit.solver_coefficients, tol, with_zero_group);
  fit.settings.extract_tol = tol;
  fit.settings.standardized = prep.standardized;
  fit.settings.centered = prep.centered;
}

void warn_l1_tails(FitResult& fit, std::initializer_list<const PenaltySpec*> specs) {
  for (const PenaltySpec* s : specs) {
    if (s != nullptr && !s->flat_tail()) {
      fit.warnings.push_back("L1 penalty has no flat tail; exact group recovery is not expected");
      return;
    }
  }
}

PairGraph chain_graph(const RankMap& tau, double lambda) {
  PairGraph g;
  g.lambda_between = lambda;
  for (size_t j = 0; j + 1 < tau.order.size(); ++j) {
    const int a = tau.order[j], b = tau.order[j + 1];
    g.pairs.push_back({std::min(a, b), std::max(a, b), PairTier::Between});
  }
  return g;
}

}  // namespace

FitResult fit_bcards(const DesignMatrix& X, const ResponseVector& y, const Vector& beta_tilde,
                     const PenaltySpec& spec, const SolverConfig& config) {
  Prepared prep = prepare(X, y, config);
  const Vector bt = prep.to_solver(beta_tilde);
  const PairGraph graph = chain_graph(rank_map(bt), spec.lambda);
  FitResult fit = lla_solve(prep.X, prep.y, graph, spec, spec, std::nullopt, bt, config);
  finalize(fit, prep, config, false);
  warn_l1_tails(fit, {&spec});
  fit.settings.method = "bcards";
  fit.settings.penalty = spec.kind_name();
  fit.settings.lambda = spec.lambda;
  fit.settings.a = spec.a;
  return fit;
}

FitResult fit_acards(const DesignMatrix& X, const ResponseVector& y, const Vector& beta_tilde,
                     double delta, const PenaltySpec& spec1, const PenaltySpec& spec2,
                     const SolverConfig& config) {
  Prepared prep = prepare(X, y, config);
  const Vector bt = prep.to_solver(beta_tilde);
  const Segmentation seg = build_segments(bt, rank_map(bt), delta);
  const PairGraph graph = build_pair_graph(seg, spec1.lambda, spec2.lambda);
  FitResult fit = lla_solve(prep.X, prep.y, graph, spec1, spec2, std::nullopt, bt, config);
  finalize(fit, prep, config, false);
  warn_l1_tails(fit, {&spec1, &spec2});
  fit.settings.method = "acards";
  fit.settings.penalty = spec1.kind_name();
  fit.settings.lambda1 = spec1.lambda;
  fit.settings.lambda2 = spec2.lambda;
  fit.settings.delta = delta;
  fit.settings.a = spec1.a;
  return fit;
}

FitResult fit_scards(const DesignMatrix& X, const ResponseVector& y, const Vector& beta_tilde,
                     double delta, const PenaltySpec& spec1, const PenaltySpec& spec2,
                     const PenaltySpec& sparsity_spec, const SolverConfig& config) {
  Prepared prep = prepare(X, y, config);
  const Vector bt = prep.to_solver(beta_tilde);
  const Segmentation seg = build_segments_sparse(bt, delta);
  const PairGraph graph = build_pair_graph(seg, spec1.lambda, spec2.lambda);
  std::vector<int> support;
  for (const auto& s : seg.segments) support.insert(support.end(), s.begin(), s.end());
  std::sort(support.begin(), support.end());
  FitResult fit = lla_solve(prep.X, prep.y, graph, spec1, spec2, sparsity_spec, bt, config, support);
  finalize(fit, prep, config, true);
  warn_l1_tails(fit, {&spec1, &spec2, &sparsity_spec});
  fit.settings.method = "scards";
  fit.settings.penalty = spec1.kind_name();
  fit.settings.lambda1 = spec1.lambda;
  fit.settings.lambda2 = spec2.lambda;
  fit.settings.sparsity_lambda = sparsity_spec.lambda;
  fit.settings.delta = delta;
  fit.settings.a = spec1.a;
  return fit;
}

FitResult fit_tv(const DesignMatrix& X, const ResponseVector& y, const PenaltySpec& spec,
                 const SolverConfig& config) {
  Prepared prep = prepare(X, y, config);
  const int p = X.p();
  Segmentation seg;
  seg.segments.emplace_back();
  seg.segments[0].resize(static_cast<size_t>(p));
  std::iota(seg.segments[0].begin(), seg.segments[0].end(), 0);
  const PairGraph graph = build_pair_graph(seg, 0.0, spec.lambda);
  // LLA needs a spread-out initial: at an all-zero start every pairwise
  // weight ties and the first iterate is already fully fused. Least squares
  // is the natural choice when it exists; marginal statistics otherwise.
  Vector init = prep.X.transpose() * prep.y / X.n();
  if (p <= X.n()) {
    try {
      init = fit_ols(DesignMatrix::from(prep.X), ResponseVector::from(prep.y));
    } catch (const Error&) {
    }
  }
  FitResult fit = lla_solve(prep.X, prep.y, graph, spec, spec, std::nullopt, init, config);
  finalize(fit, prep, config, false);
  fit.settings.method = "tv";
  fit.settings.penalty = spec.kind_name();
  fit.settings.lambda = spec.lambda;
  fit.settings.a = spec.a;
  return fit;
}

FitResult fit_fused_ordered(const DesignMatrix& X, const ResponseVector& y,
                            const Vector& beta_tilde, double lambda,
                            const SolverConfig& config) {
  Prepared prep = prepare(X, y, config);
  const Vector bt = prep.to_solver(beta_tilde);
  const PenaltySpec spec = PenaltySpec::l1(lambda);
  const PairGraph graph = chain_graph(rank_map(bt), lambda);
  FitResult fit = lla_solve(prep.X, prep.y, graph, spec, spec, std::nullopt, bt, config);
  finalize(fit, prep, config, false);
  fit.settings.method = "fused";
  fit.settings.penalty = spec.kind_name();
  fit.settings.lambda = lambda;
  return fit;
}

}  // namespace cards
