#pragma once

#include "cards/types.hpp"

namespace cards {

/// Normalized mutual information between two partitions of the same index
/// set (the zero group counts as a group). Natural logs, positive entropies;
/// two trivial one-group partitions compare as 1.
double nmi(const Partition& C, const Partition& D, int p);

/// Mean squared prediction error over a test set.
double prediction_error(const Vector& beta_hat, double intercept, const Matrix& X_test,
                        const Vector& y_test);

/// Count of indices outside the true support with |beta_j| > tol.
int false_positives(const Vector& beta_hat, const std::vector<int>& true_support, double tol);

/// Running discounted sum c_t = sum_{s<=t} rho^{floor(s/10)} * sum_i E(i,s),
/// where E holds per-entity-per-time squared errors and s is 1-based.
std::vector<double> cumulative_rss(const Matrix& squared_errors, double rho);

}  // namespace cards
