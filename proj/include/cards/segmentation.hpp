#pragma once

#include "cards/types.hpp"

namespace cards {

/// Sorting permutation of a preliminary estimate; ties break by index.
RankMap rank_map(const Vector& beta_tilde);

/// Cuts the rank-ordered coefficients wherever a consecutive gap exceeds
/// delta (strictly). delta = 0 yields one segment per distinct value.
Segmentation build_segments(const Vector& beta_tilde, const RankMap& tau, double delta);

/// Sparse variant: exact zeros of beta_tilde form the zero set, segments are
/// built over the nonzero coordinates. Throws AllZero when nothing is left.
Segmentation build_segments_sparse(const Vector& beta_tilde, double delta);

/// Between pairs join adjacent segments, within pairs join indices of one
/// segment (unordered, each pair once). Zero-set members appear in no pair.
PairGraph build_pair_graph(const Segmentation& seg, double lambda1, double lambda2);

/// max of beta_true over B_l <= min over B_{l+1} for all adjacent segments
/// (and beta_true vanishing on the zero set, when present).
bool order_preserving(const Segmentation& seg, const Vector& beta_true);

/// Number of adjacent true-value changes along the ranking.
int jump_count(const RankMap& tau, const Vector& beta_true);

/// Untuned default for the gap threshold: the median consecutive gap of the
/// sorted preliminary (scale-adaptive, yields roughly p/2 segments).
double default_delta(const Vector& beta_tilde);

}  // namespace cards
