#pragma once

#include <optional>

#include "cards/graph_lasso.hpp"
#include "cards/penalty.hpp"
#include "cards/types.hpp"

namespace cards {

struct SolverConfig {
  double admm_tol = 1e-7;  // scaled by sqrt(#constraints)
  int max_admm = 20000;
  double rho = 1.0;
  double lla_tol = 1e-7;  // max coefficient change between LLA iterates
  int max_lla = 20;
  double extract_tol = 0.0;  // 0 -> 1e-4 * max(1, ||beta||_inf)
  bool standardize = true;
  bool center = true;
  bool record_iterates = false;
  bool use_reference_kernels = false;
};

double default_extract_tol(const Vector& beta);

/// Sorts the coefficients and cuts wherever a consecutive gap exceeds tol
/// (gap-chaining). With `with_zero_group`, entries with |beta_j| <= tol form
/// the zero group first. Groups come out ordered by ascending value.
Partition extract_partition(const Vector& beta_hat, double tol, bool with_zero_group = false);

/// LLA outer loop over ADMM-solved weighted subproblems, on an explicit
/// quadratic form. `tiers[e]` selects spec1 (between) or spec2 (within) for
/// pair e; `sparsity` adds coordinatewise weights on the support.
FitResult lla_solve_quad(const QuadraticForm& quad,
                         const std::vector<std::pair<int, int>>& pairs,
                         const std::vector<PairTier>& tiers, const PenaltySpec& spec1,
                         const PenaltySpec& spec2, const std::optional<PenaltySpec>& sparsity,
                         const Vector& initial, const SolverConfig& config,
                         const std::vector<int>& support = {});

/// Same, building the quadratic from (X, y). No standardization here; the
/// fit_* entry points own that.
FitResult lla_solve(const Matrix& X, const Vector& y, const PairGraph& graph,
                    const PenaltySpec& spec1, const PenaltySpec& spec2,
                    const std::optional<PenaltySpec>& sparsity, const Vector& initial,
                    const SolverConfig& config, const std::vector<int>& support = {});

/// Fused chain along the ranking of beta_tilde (p-1 adjacent pairs).
FitResult fit_bcards(const DesignMatrix& X, const ResponseVector& y, const Vector& beta_tilde,
                     const PenaltySpec& spec, const SolverConfig& config = {});

/// Rank -> delta-gap segmentation -> hybrid pair graph -> LLA.
FitResult fit_acards(const DesignMatrix& X, const ResponseVector& y, const Vector& beta_tilde,
                     double delta, const PenaltySpec& spec1, const PenaltySpec& spec2,
                     const SolverConfig& config = {});

/// Sparse variant: segments over the nonzeros of beta_tilde, coordinates off
/// the support fixed at zero, coordinatewise penalty on the support.
FitResult fit_scards(const DesignMatrix& X, const ResponseVector& y, const Vector& beta_tilde,
                     double delta, const PenaltySpec& spec1, const PenaltySpec& spec2,
                     const PenaltySpec& sparsity_spec, const SolverConfig& config = {});

/// Exhaustive pairwise penalty (single segment).
FitResult fit_tv(const DesignMatrix& X, const ResponseVector& y, const PenaltySpec& spec,
                 const SolverConfig& config = {});

/// Fused chain with the L1 penalty (one LLA iteration by construction).
FitResult fit_fused_ordered(const DesignMatrix& X, const ResponseVector& y,
                            const Vector& beta_tilde, double lambda,
                            const SolverConfig& config = {});

}  // namespace cards
