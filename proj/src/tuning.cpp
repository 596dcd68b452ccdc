#include "cards/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "cards/parallel.hpp"
#include "cards/segmentation.hpp"

namespace cards {

namespace {

double rss_of(const DesignMatrix& X, const ResponseVector& y, const FitResult& fit) {
  Vector pred = X.values * fit.coefficients;
  pred.array() += fit.intercept;
  return (y.values - pred).squaredNorm();
}

int df_of(const FitResult& fit) { return fit.partition.group_count(); }

PenaltySpec make_spec(PenaltySpec::Kind kind, double lambda, double a) {
  switch (kind) {
    case PenaltySpec::Kind::Scad: return PenaltySpec::scad(lambda, a);
    case PenaltySpec::Kind::Mcp: return PenaltySpec::mcp(lambda, a);
    case PenaltySpec::Kind::L1: return PenaltySpec::l1(lambda);
  }
  throw Error(ErrorCode::InvalidSpec, "unknown penalty kind");
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> out;
  if (!(hi > 0.0)) return {0.0};
  lo = std::max(lo, hi * 1e-8);
  out.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    out.push_back(std::exp(std::log(lo) * (1.0 - f) + std::log(hi) * f));
  }
  return out;
}

}  // namespace

double bic_score(const DesignMatrix& X, const ResponseVector& y, const FitResult& fit) {
  const double n = static_cast<double>(X.n());
  const double rss = rss_of(X, y, fit);
  if (rss <= 1e-12 * y.values.squaredNorm() || rss == 0.0) {
    std::cerr << "warning: BIC undefined for an interpolating fit (RSS ~ 0); returning -inf\n";
    return -std::numeric_limits<double>::infinity();
  }
  return n * std::log(rss / n) + std::log(n) * df_of(fit);
}

double gcv_score(const DesignMatrix& X, const ResponseVector& y, const FitResult& fit) {
  const double n = static_cast<double>(X.n());
  const int df = df_of(fit);
  if (df >= X.n()) {
    throw Error(ErrorCode::DfTooLarge, "GCV undefined for df >= n", df);
  }
  const double rss = rss_of(X, y, fit);
  const double denom = 1.0 - static_cast<double>(df) / n;
  return (rss / n) / (denom * denom);
}

TuneGrids default_grids(TuneMethod method, const DesignMatrix& X, const ResponseVector& y,
                        const Vector& beta_tilde) {
  const Vector z = X.values.transpose() * y.values / X.n();
  double zmin = z.minCoeff(), zmax = z.maxCoeff();
  const double lmax = std::max(zmax - zmin, 1e-8);

  TuneGrids grids;
  if (method == TuneMethod::Bcards || method == TuneMethod::Tv ||
      method == TuneMethod::FusedOrdered) {
    grids.lambda = log_spaced(0.01 * lmax, lmax, 30);
    return grids;
  }

  const double q = default_delta(beta_tilde);
  // Coarse multiples matter: segments must be able to swallow whole
  // coefficient clusters, whose spread sits well above the median gap.
  grids.delta = {0.0, 0.25 * q, 0.5 * q, q, 2.0 * q, 4.0 * q, 8.0 * q};
  grids.lambda1 = log_spaced(0.02 * lmax, lmax, 12);
  grids.lambda2 = log_spaced(0.002 * lmax, 0.2 * lmax, 5);
  if (method == TuneMethod::Scards) {
    const double smax = std::max(z.cwiseAbs().maxCoeff(), 1e-8);
    grids.sparsity_lambda = log_spaced(0.02 * smax, 0.5 * smax, 4);
    grids.delta = {0.0, 0.5 * q, q, 2.0 * q, 4.0 * q};  // keep the joint grid tractable
    grids.lambda1 = log_spaced(0.02 * lmax, lmax, 8);
    grids.lambda2 = log_spaced(0.002 * lmax, 0.2 * lmax, 4);
  }
  return grids;
}

GridResult grid_search(TuneMethod method, const DesignMatrix& X, const ResponseVector& y,
                       const Vector& beta_tilde, const TuneGrids& grids, Criterion criterion,
                       const SolverConfig& config, PenaltySpec::Kind kind, double a) {
  std::vector<GridPoint> points;
  switch (method) {
    case TuneMethod::Bcards:
    case TuneMethod::Tv:
    case TuneMethod::FusedOrdered:
      if (grids.lambda.empty()) throw Error(ErrorCode::BadArgument, "empty lambda grid");
      for (double l : grids.lambda) points.push_back({l, 0, 0, 0, 0});
      break;
    case TuneMethod::Acards:
      if (grids.lambda1.empty() || grids.lambda2.empty() || grids.delta.empty()) {
        throw Error(ErrorCode::BadArgument, "acards needs lambda1, lambda2 and delta grids");
      }
      for (double d : grids.delta)
        for (double l1 : grids.lambda1)
          for (double l2 : grids.lambda2) points.push_back({0, l1, l2, d, 0});
      break;
    case TuneMethod::Scards:
      if (grids.lambda1.empty() || grids.lambda2.empty() || grids.delta.empty() ||
          grids.sparsity_lambda.empty()) {
        throw Error(ErrorCode::BadArgument, "scards needs lambda1/lambda2/delta/sparsity grids");
      }
      for (double d : grids.delta)
        for (double l1 : grids.lambda1)
          for (double l2 : grids.lambda2)
            for (double ls : grids.sparsity_lambda) points.push_back({0, l1, l2, d, ls});
      break;
  }

  auto fit_at = [&](const GridPoint& pt) -> FitResult {
    switch (method) {
      case TuneMethod::Bcards:
        return fit_bcards(X, y, beta_tilde, make_spec(kind, pt.lambda, a), config);
      case TuneMethod::Tv:
        return fit_tv(X, y, make_spec(kind, pt.lambda, a), config);
      case TuneMethod::FusedOrdered:
        return fit_fused_ordered(X, y, beta_tilde, pt.lambda, config);
      case TuneMethod::Acards:
        return fit_acards(X, y, beta_tilde, pt.delta, make_spec(kind, pt.lambda1, a),
                          make_spec(kind, pt.lambda2, a), config);
      case TuneMethod::Scards:
        return fit_scards(X, y, beta_tilde, pt.delta, make_spec(kind, pt.lambda1, a),
                          make_spec(kind, pt.lambda2, a), make_spec(kind, pt.sparsity_lambda, a),
                          config);
    }
    throw Error(ErrorCode::BadArgument, "unknown method");
  };

  const int npts = static_cast<int>(points.size());
  std::vector<ScoreRow> table(static_cast<size_t>(npts));
  const int nt = par::active_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
  for (int i = 0; i < npts; ++i) {
    ScoreRow row;
    row.point = points[static_cast<size_t>(i)];
    try {
      const FitResult fit = fit_at(row.point);
      row.rss = rss_of(X, y, fit);
      row.df = df_of(fit);
      row.score = criterion == Criterion::Bic ? bic_score(X, y, fit) : gcv_score(X, y, fit);
    } catch (const Error& e) {
      row.failed = true;
      row.error = e.what();
    }
    table[static_cast<size_t>(i)] = std::move(row);
  }

  // Ties break toward the sparser/coarser model: larger lambda, then delta.
  auto better = [](const ScoreRow& a_, const ScoreRow& b_) {
    if (a_.failed != b_.failed) return !a_.failed;
    if (a_.score != b_.score) return a_.score < b_.score;
    const double la = std::max(a_.point.lambda, a_.point.lambda1);
    const double lb = std::max(b_.point.lambda, b_.point.lambda1);
    if (la != lb) return la > lb;
    return a_.point.delta > b_.point.delta;
  };
  int best = -1;
  for (int i = 0; i < npts; ++i) {
    if (table[static_cast<size_t>(i)].failed) continue;
    if (best < 0 || better(table[static_cast<size_t>(i)], table[static_cast<size_t>(best)])) best = i;
  }
  if (best < 0) {
    throw Error(ErrorCode::NoConvergence, "every grid point failed: " +
                                              (npts > 0 ? table[0].error : std::string("empty")));
  }

  GridResult res;
  res.table = std::move(table);
  res.best_point = res.table[static_cast<size_t>(best)].point;
  res.best = fit_at(res.best_point);
  return res;
}

}  // namespace cards
