#pragma once

#include "cards/solver.hpp"
#include "cards/types.hpp"

namespace cards {

/// n*ln(RSS/n) + ln(n)*df with df = number of distinct nonzero coefficient
/// groups in the extracted partition. An (effectively) interpolating fit
/// returns -inf with a warning on stderr.
double bic_score(const DesignMatrix& X, const ResponseVector& y, const FitResult& fit);

/// (RSS/n) / (1 - df/n)^2. Throws DfTooLarge when df >= n.
double gcv_score(const DesignMatrix& X, const ResponseVector& y, const FitResult& fit);

enum class TuneMethod { Bcards, Acards, Scards, Tv, FusedOrdered };
enum class Criterion { Bic, Gcv };

struct TuneGrids {
  std::vector<double> lambda;           // bcards / tv / fused
  std::vector<double> lambda1;          // acards / scards between
  std::vector<double> lambda2;          // acards / scards within
  std::vector<double> delta;            // acards / scards
  std::vector<double> sparsity_lambda;  // scards
};

/// 30 log-spaced lambdas on [0.01*lmax, lmax] with lmax the largest pairwise
/// gap of z = X'y/n; delta grid {0, .25q, .5q, q, 2q} with q the median
/// consecutive gap of the sorted preliminary.
TuneGrids default_grids(TuneMethod method, const DesignMatrix& X, const ResponseVector& y,
                        const Vector& beta_tilde);

struct GridPoint {
  double lambda = 0.0, lambda1 = 0.0, lambda2 = 0.0, delta = 0.0, sparsity_lambda = 0.0;
};

struct ScoreRow {
  GridPoint point;
  double score = 0.0;
  double rss = 0.0;
  int df = 0;
  bool failed = false;
  std::string error;
};

struct GridResult {
  FitResult best;
  GridPoint best_point;
  std::vector<ScoreRow> table;
};

/// Evaluates every grid point (concurrently; the outcome does not depend on
/// thread count), scores with the criterion and refits the winner. Ties go
/// to the larger lambda, then the larger delta. Failed points are recorded;
/// only an all-failed grid throws.
GridResult grid_search(TuneMethod method, const DesignMatrix& X, const ResponseVector& y,
                       const Vector& beta_tilde, const TuneGrids& grids, Criterion criterion,
                       const SolverConfig& config, PenaltySpec::Kind kind = PenaltySpec::Kind::Scad,
                       double a = 3.7);

}  // namespace cards
