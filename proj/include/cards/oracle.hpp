#pragma once

#include "cards/penalty.hpp"
#include "cards/types.hpp"

namespace cards {

/// Least squares constrained to a known grouping: design columns are summed
/// within each group, the zero group is fixed at 0, and the K fitted values
/// are broadcast back. Grouped standard errors use RSS/(n-K).
FitResult oracle_fit(const DesignMatrix& X, const ResponseVector& y, const Partition& part);

struct KktOracleReport {
  bool pass = false;
  bool flat_ok = false;
  bool partial_ok = false;
  /// min over group boundaries of |coefficient jump| - a*lambda (flat-tail
  /// kinds; for L1 it is -p'(|jump|), which can only reach 0 at lambda = 0).
  double worst_flat_margin = 0.0;
  /// min over within-group prefixes of p'(0+) - |sum of (oracle - z)|.
  double worst_partial_margin = 0.0;
};

/// Stationarity test of the oracle estimator for the fused chain along tau,
/// valid on (near-)orthogonal designs: ||X'X/n - I||_max <= 1e-8, groups
/// occupying contiguous runs of tau. Throws NotApplicable otherwise.
KktOracleReport kkt_oracle_check(const DesignMatrix& X, const ResponseVector& y,
                                 const Partition& part, const RankMap& tau,
                                 const PenaltySpec& spec);

struct IrrepReport {
  Vector d0;      // adjacent difference of the jump-sign vector, per group
  Vector b0;      // X'X_A (X_A'X_A)^{-1} d0
  double margin = 0.0;  // largest omega with the bound satisfied (may be <= 0)
  bool satisfied = false;
  bool jump_signs_ok = false;  // consecutive jumps alternate in sign
};

/// Sign-consistency condition for the L1 fused chain. Groups must occupy
/// contiguous runs of tau (throws InconsistentOrder otherwise);
/// beta_true_grouped is aligned with part.groups.
IrrepReport irrepresentability_check(const DesignMatrix& X, const Partition& part,
                                     const RankMap& tau,
                                     const GroupedCoefficients& beta_true_grouped);

struct RegularityReport {
  Vector sigma;  // per group: largest eigenvalue of X_k'X_k / n
  Vector nu;     // per group: worst deviation-from-centrality of X_k'X mu / n
                 // over unit mu in the grouped subspace
  double c1 = 0.0, c2 = 0.0;  // extreme eigenvalues of D^{-1}X_A'X_A D^{-1}/n
  double b_n = 0.0;           // half the minimal gap between group values
};

RegularityReport regularity_constants(const DesignMatrix& X, const Partition& part,
                                      const GroupedCoefficients& beta_true_grouped);

enum class LambdaVariant { Bcards, AcardsBetween, AcardsWithin };

/// Plug-in tuning-parameter scale from the regularity constants. Advisory.
double lambda_bounds(const RegularityReport& report, int n, int p, int K,
                     const std::vector<int>& group_sizes, LambdaVariant variant);

/// (v1n, v2n): asymptotic variance quadratic forms of the unrestricted and
/// the group-constrained least squares along direction a_n; v1n >= v2n.
std::pair<double, double> variance_pair(const DesignMatrix& X, const Partition& part,
                                        const Vector& a_n);

}  // namespace cards
