#include "cards/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cards {

namespace {

Matrix grouped_design(const Matrix& X, const Partition& part) {
  const int K = part.group_count();
  Matrix XA(X.rows(), K);
  for (int k = 0; k < K; ++k) {
    XA.col(k).setZero();
    for (int j : part.groups[static_cast<size_t>(k)]) XA.col(k) += X.col(j);
  }
  return XA;
}

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

/// Group id per index along with the contiguous-run order under tau.
/// Returns run-ordered group ids; throws InconsistentOrder if some group is
/// split across runs.
std::vector<int> run_order(const Partition& part, const RankMap& tau, int p) {
  std::vector<int> group_of(static_cast<size_t>(p), -1);
  for (size_t k = 0; k < part.groups.size(); ++k) {
    for (int j : part.groups[k]) group_of[static_cast<size_t>(j)] = static_cast<int>(k);
  }
  std::vector<int> order;
  std::vector<char> seen(part.groups.size(), 0);
  int prev = -1;
  for (int pos = 0; pos < p; ++pos) {
    const int g = group_of[static_cast<size_t>(tau.order[static_cast<size_t>(pos)])];
    if (g < 0) {
      throw Error(ErrorCode::InconsistentOrder, "rank map covers an index outside the partition");
    }
    if (g != prev) {
      if (seen[static_cast<size_t>(g)]) {
        throw Error(ErrorCode::InconsistentOrder,
                    "group " + std::to_string(g + 1) + " is split across rank runs", g + 1);
      }
      seen[static_cast<size_t>(g)] = 1;
      order.push_back(g);
      prev = g;
    }
  }
  return order;
}

}  // namespace

FitResult oracle_fit(const DesignMatrix& X, const ResponseVector& y, const Partition& part) {
  const int n = X.n();
  const int p = X.p();
  validate_partition(part, p);
  const int K = part.group_count();
  if (K == 0) throw Error(ErrorCode::BadArgument, "oracle fit needs at least one nonzero group");

  const Matrix XA = grouped_design(X.values, part);
  Eigen::BDCSVD<Matrix> svd(XA, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv[sv.size() - 1] < 1e-10 * sv[0]) {
    throw Error(ErrorCode::SingularGroupedGram, "grouped design is numerically rank deficient");
  }
  const Vector mu = svd.solve(y.values);

  FitResult fit;
  fit.coefficients = Vector::Zero(p);
  for (int k = 0; k < K; ++k) {
    for (int j : part.groups[static_cast<size_t>(k)]) fit.coefficients[j] = mu[k];
  }
  fit.solver_coefficients = fit.coefficients;
  fit.partition = part;
  const double rss = (y.values - XA * mu).squaredNorm();
  fit.objective = rss / (2.0 * n);
  fit.converged = true;
  fit.iterations = 0;
  fit.settings.method = "oracle";

  if (n > K) {
    const double sigma2 = rss / static_cast<double>(n - K);
    const Matrix gram_inv = (XA.transpose() * XA).ldlt().solve(Matrix::Identity(K, K));
    fit.standard_errors.resize(static_cast<size_t>(K));
    for (int k = 0; k < K; ++k) {
      fit.standard_errors[static_cast<size_t>(k)] = std::sqrt(sigma2 * gram_inv(k, k));
    }
  }
  return fit;
}

KktOracleReport kkt_oracle_check(const DesignMatrix& X, const ResponseVector& y,
                                 const Partition& part, const RankMap& tau,
                                 const PenaltySpec& spec) {
  const int n = X.n();
  const int p = X.p();
  if (!part.zero_group.empty()) {
    throw Error(ErrorCode::NotApplicable, "check is defined for partitions without a zero group");
  }
  const Matrix gram = X.values.transpose() * X.values / n;
  if ((gram - Matrix::Identity(p, p)).cwiseAbs().maxCoeff() > 1e-8) {
    throw Error(ErrorCode::NotApplicable, "design is not orthogonal to working tolerance");
  }
  std::vector<int> runs;
  try {
    runs = run_order(part, tau, p);
  } catch (const Error& e) {
    throw Error(ErrorCode::NotApplicable, e.what());
  }

  const Vector z = X.values.transpose() * y.values / n;
  const FitResult oracle = oracle_fit(X, y, part);
  const Vector& bo = oracle.coefficients;

  KktOracleReport rep;
  rep.worst_flat_margin = std::numeric_limits<double>::infinity();
  rep.worst_partial_margin = std::numeric_limits<double>::infinity();
  rep.flat_ok = true;
  rep.partial_ok = true;

  // Flat-tail condition at every boundary between consecutive runs.
  int pos = 0;
  std::vector<std::pair<int, int>> run_spans;  // [start, end) positions in tau order
  for (int g : runs) {
    const int len = static_cast<int>(part.groups[static_cast<size_t>(g)].size());
    run_spans.emplace_back(pos, pos + len);
    pos += len;
  }
  for (size_t r = 1; r < run_spans.size(); ++r) {
    const double jump = bo[tau.order[static_cast<size_t>(run_spans[r].first)]] -
                        bo[tau.order[static_cast<size_t>(run_spans[r].first - 1)]];
    if (penalty_derivative(spec, std::abs(jump)) != 0.0) rep.flat_ok = false;
    const double margin = spec.flat_tail() ? std::abs(jump) - spec.a * spec.lambda
                                           : -penalty_derivative(spec, std::abs(jump));
    rep.worst_flat_margin = std::min(rep.worst_flat_margin, margin);
  }

  // Within-run prefix sums of (oracle - z) against p'(0+).
  const double bound = penalty_derivative(spec, 0.0);
  for (const auto& [start, end] : run_spans) {
    double acc = bo[tau.order[static_cast<size_t>(start)]] - z[tau.order[static_cast<size_t>(start)]];
    for (int j = start + 1; j < end; ++j) {
      acc += bo[tau.order[static_cast<size_t>(j)]] - z[tau.order[static_cast<size_t>(j)]];
      const double margin = bound - std::abs(acc);
      rep.worst_partial_margin = std::min(rep.worst_partial_margin, margin);
      if (margin < 0.0) rep.partial_ok = false;
    }
  }
  rep.pass = rep.flat_ok && rep.partial_ok;
  return rep;
}

IrrepReport irrepresentability_check(const DesignMatrix& X, const Partition& part,
                                     const RankMap& tau,
                                     const GroupedCoefficients& beta_true_grouped) {
  const int n = X.n();
  const int p = X.p();
  if (!part.zero_group.empty()) {
    throw Error(ErrorCode::BadArgument, "irrepresentability check expects a complete partition");
  }
  validate_partition(part, p);
  const std::vector<int> runs = run_order(part, tau, p);
  const int K = static_cast<int>(runs.size());

  // Re-index groups and values in run order.
  std::vector<const std::vector<int>*> groups(static_cast<size_t>(K));
  Vector values(K);
  for (int k = 0; k < K; ++k) {
    groups[static_cast<size_t>(k)] = &part.groups[static_cast<size_t>(runs[static_cast<size_t>(k)])];
    values[k] = beta_true_grouped.values[runs[static_cast<size_t>(k)]];
  }

  IrrepReport rep;
  rep.d0 = Vector::Zero(K);
  if (K >= 2) {
    rep.d0[0] = sign_of(values[1] - values[0]);
    rep.d0[K - 1] = -sign_of(values[K - 1] - values[K - 2]);
    for (int k = 1; k + 1 < K; ++k) {
      rep.d0[k] = sign_of(values[k + 1] - values[k]) - sign_of(values[k] - values[k - 1]);
    }
  }

  Partition run_part;
  for (int k = 0; k < K; ++k) run_part.groups.push_back(*groups[static_cast<size_t>(k)]);
  const Matrix XA = grouped_design(X.values, run_part);
  rep.b0 = X.values.transpose() * XA * (XA.transpose() * XA).ldlt().solve(rep.d0);

  rep.jump_signs_ok = true;
  for (int k = 1; k + 1 < K; ++k) {
    if (sign_of(values[k] - values[k - 1]) == sign_of(values[k + 1] - values[k])) {
      rep.jump_signs_ok = false;
    }
  }

  if (K == 1) {
    rep.margin = 1.0;
    rep.satisfied = true;
    return rep;
  }

  // Walk tau once to know each index's within-run rank.
  std::vector<int> group_of(static_cast<size_t>(p), -1);
  for (int k = 0; k < K; ++k) {
    for (int j : *groups[static_cast<size_t>(k)]) group_of[static_cast<size_t>(j)] = k;
  }
  std::vector<std::vector<int>> run_elements(static_cast<size_t>(K));  // in tau order
  for (int pos = 0; pos < p; ++pos) {
    const int j = tau.order[static_cast<size_t>(pos)];
    run_elements[static_cast<size_t>(group_of[static_cast<size_t>(j)])].push_back(j);
  }

  double worst = 0.0;
  for (int k = 0; k < K; ++k) {
    const auto& elems = run_elements[static_cast<size_t>(k)];
    const int m = static_cast<int>(elems.size());
    if (m < 2) continue;  // the only position is the run's last, which is excluded
    // prefix sums of b0 along the run
    std::vector<double> prefix(static_cast<size_t>(m) + 1, 0.0);
    for (int t = 0; t < m; ++t) {
      prefix[static_cast<size_t>(t) + 1] = prefix[static_cast<size_t>(t)] + rep.b0[elems[static_cast<size_t>(t)]];
    }
    const double sgn_prev = k > 0 ? sign_of(values[k] - values[k - 1]) : 0.0;
    const double sgn_next = k + 1 < K ? sign_of(values[k + 1] - values[k]) : 0.0;
    for (int t = 1; t < m; ++t) {  // t = |A^1|, excludes the full run
      const double theta = static_cast<double>(t) / m;
      const double bar_hi = prefix[static_cast<size_t>(t)] / t;
      const double bar_lo = (prefix[static_cast<size_t>(m)] - prefix[static_cast<size_t>(t)]) / (m - t);
      const double centrality = static_cast<double>(m) * m * theta * (1.0 - theta) * (bar_hi - bar_lo);
      double expr;
      if (k == 0) {
        expr = theta * sgn_next + centrality;
      } else if (k + 1 == K) {
        expr = (1.0 - theta) * sgn_prev + centrality;
      } else {
        expr = (1.0 - theta) * sgn_prev + theta * sgn_next + centrality;
      }
      worst = std::max(worst, std::abs(expr));
    }
  }
  rep.margin = 1.0 - worst;
  rep.satisfied = rep.margin > 0.0;
  return rep;
}

RegularityReport regularity_constants(const DesignMatrix& X, const Partition& part,
                                      const GroupedCoefficients& beta_true_grouped) {
  const int n = X.n();
  const int K = part.group_count();
  RegularityReport rep;
  rep.sigma = Vector::Zero(K);
  rep.nu = Vector::Zero(K);

  Matrix XA = grouped_design(X.values, part);
  Vector dinv(K);
  for (int k = 0; k < K; ++k) {
    dinv[k] = 1.0 / std::sqrt(static_cast<double>(part.groups[static_cast<size_t>(k)].size()));
  }
  const Matrix GA = dinv.asDiagonal() * (XA.transpose() * XA) * dinv.asDiagonal() / n;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(GA);
  rep.c1 = eig.eigenvalues().minCoeff();
  rep.c2 = eig.eigenvalues().maxCoeff();

  for (int k = 0; k < K; ++k) {
    const auto& g = part.groups[static_cast<size_t>(k)];
    Matrix Xk(X.n(), static_cast<int>(g.size()));
    for (size_t c = 0; c < g.size(); ++c) Xk.col(static_cast<Eigen::Index>(c)) = X.values.col(g[c]);
    Eigen::SelfAdjointEigenSolver<Matrix> ek(Xk.transpose() * Xk / n);
    rep.sigma[k] = ek.eigenvalues().maxCoeff();

    // nu_k: max over unit mu in the grouped subspace of the deviation from
    // centrality of X_k' X mu / n. Writing mu through the normalized group
    // indicators reduces it to the largest row norm of the row-centered
    // matrix X_k' X_A D^{-1} / n (see docs/deviation_from_centrality.md).
    Matrix G = (Xk.transpose() * XA) * dinv.asDiagonal() / n;
    const Eigen::RowVectorXd mean_row = G.colwise().mean();
    G.rowwise() -= mean_row;
    rep.nu[k] = G.rowwise().norm().maxCoeff();
  }

  rep.b_n = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) {
    for (int l = k + 1; l < K; ++l) {
      rep.b_n = std::min(rep.b_n,
                         0.5 * std::abs(beta_true_grouped.values[k] - beta_true_grouped.values[l]));
    }
  }
  if (K == 1) rep.b_n = std::numeric_limits<double>::infinity();
  return rep;
}

double lambda_bounds(const RegularityReport& report, int n, int p, int K,
                     const std::vector<int>& group_sizes, LambdaVariant variant) {
  if (static_cast<int>(group_sizes.size()) != K || report.sigma.size() != K) {
    throw Error(ErrorCode::BadArgument, "group size / report mismatch");
  }
  const double logp = std::log(static_cast<double>(p));
  const double logn = std::log(static_cast<double>(n));
  double worst = 0.0;
  for (int k = 0; k < K; ++k) {
    const double ak = static_cast<double>(group_sizes[static_cast<size_t>(k)]);
    double scale = 0.0;
    switch (variant) {
      case LambdaVariant::Bcards:
      case LambdaVariant::AcardsBetween:
        // The between-segment bound carries a 1/|V_kh|^2 factor; taking
        // |V_kh| = 1 keeps the conservative (largest) scale.
        scale = std::sqrt(report.sigma[k] * ak * logp / n) +
                (1.0 + report.nu[k] * ak) * std::sqrt(static_cast<double>(K) * logn / n);
        break;
      case LambdaVariant::AcardsWithin:
        scale = std::sqrt(logp / (n * ak)) +
                report.nu[k] * std::sqrt(static_cast<double>(K) * logn / (n * ak));
        break;
    }
    worst = std::max(worst, scale);
  }
  return worst;
}

std::pair<double, double> variance_pair(const DesignMatrix& X, const Partition& part,
                                        const Vector& a_n) {
  const int p = X.p();
  if (!part.zero_group.empty()) {
    throw Error(ErrorCode::BadArgument, "variance comparison expects a complete partition");
  }
  validate_partition(part, p);
  if (a_n.size() != p) throw Error(ErrorCode::BadArgument, "direction has wrong length");

  const Matrix gram = X.values.transpose() * X.values;
  Eigen::LDLT<Matrix> ldlt(gram);
  const Vector w = ldlt.solve(a_n);
  if (ldlt.info() != Eigen::Success ||
      (gram * w - a_n).cwiseAbs().maxCoeff() > 1e-6 * (1.0 + a_n.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::SingularGram, "X'X is numerically singular");
  }
  const double v1 = a_n.dot(w);

  const int K = part.group_count();
  Matrix M = Matrix::Zero(p, K);
  for (int k = 0; k < K; ++k) {
    const auto& g = part.groups[static_cast<size_t>(k)];
    const double val = 1.0 / std::sqrt(static_cast<double>(g.size()));
    for (int j : g) M(j, k) = val;
  }
  const Matrix inner = M.transpose() * gram * M;
  Eigen::LDLT<Matrix> ldlt2(inner);
  const Vector Ma = M.transpose() * a_n;
  const Vector w2 = ldlt2.solve(Ma);
  if (ldlt2.info() != Eigen::Success ||
      (inner * w2 - Ma).cwiseAbs().maxCoeff() > 1e-6 * (1.0 + Ma.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::SingularGram, "grouped Gram is numerically singular");
  }
  const double v2 = Ma.dot(w2);
  return {v1, v2};
}

}  // namespace cards
