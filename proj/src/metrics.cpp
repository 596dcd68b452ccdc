#include "cards/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace cards {

namespace {

/// Non-empty blocks of a partition, zero group included.
std::vector<const std::vector<int>*> blocks_of(const Partition& P) {
  std::vector<const std::vector<int>*> blocks;
  for (const auto& g : P.groups) blocks.push_back(&g);
  if (!P.zero_group.empty()) blocks.push_back(&P.zero_group);
  return blocks;
}

}  // namespace

double nmi(const Partition& C, const Partition& D, int p) {
  validate_partition(C, p);
  validate_partition(D, p);
  if (C.covered_size() != p || D.covered_size() != p) {
    throw Error(ErrorCode::MismatchedUniverse, "partitions cover different universes");
  }

  const auto cb = blocks_of(C);
  const auto db = blocks_of(D);
  std::vector<int> d_block_of(static_cast<size_t>(p), -1);
  for (size_t b = 0; b < db.size(); ++b) {
    for (int j : *db[b]) d_block_of[static_cast<size_t>(j)] = static_cast<int>(b);
  }

  auto entropy = [&](const std::vector<const std::vector<int>*>& blocks) {
    double h = 0.0;
    for (const auto* g : blocks) {
      const double w = static_cast<double>(g->size()) / p;
      h -= w * std::log(w);
    }
    return h;
  };
  const double hc = entropy(cb);
  const double hd = entropy(db);
  if (hc == 0.0 && hd == 0.0) return 1.0;  // both trivial

  double info = 0.0;
  std::vector<int> counts(db.size(), 0);
  for (const auto* g : cb) {
    std::fill(counts.begin(), counts.end(), 0);
    for (int j : *g) ++counts[static_cast<size_t>(d_block_of[static_cast<size_t>(j)])];
    for (size_t b = 0; b < db.size(); ++b) {
      if (counts[b] == 0) continue;
      const double joint = static_cast<double>(counts[b]) / p;
      info += joint * std::log(static_cast<double>(p) * counts[b] /
                               (static_cast<double>(g->size()) * db[b]->size()));
    }
  }
  const double value = info / (0.5 * (hc + hd));
  return std::clamp(value, 0.0, 1.0);
}

double prediction_error(const Vector& beta_hat, double intercept, const Matrix& X_test,
                        const Vector& y_test) {
  if (X_test.cols() != beta_hat.size() || X_test.rows() != y_test.size()) {
    throw Error(ErrorCode::BadArgument, "test set shapes do not match");
  }
  const Vector r = y_test - (X_test * beta_hat).array().operator+(intercept).matrix();
  return r.squaredNorm() / static_cast<double>(r.size());
}

int false_positives(const Vector& beta_hat, const std::vector<int>& true_support, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::BadArgument, "tolerance must be > 0");
  std::vector<char> in_support(static_cast<size_t>(beta_hat.size()), 0);
  for (int j : true_support) in_support[static_cast<size_t>(j)] = 1;
  int count = 0;
  for (Eigen::Index j = 0; j < beta_hat.size(); ++j) {
    if (!in_support[static_cast<size_t>(j)] && std::abs(beta_hat[j]) > tol) ++count;
  }
  return count;
}

std::vector<double> cumulative_rss(const Matrix& squared_errors, double rho) {
  if (!(rho > 0.0) || rho > 1.0) {
    throw Error(ErrorCode::BadArgument, "rho must lie in (0, 1]");
  }
  const Eigen::Index T = squared_errors.cols();
  std::vector<double> series(static_cast<size_t>(T), 0.0);
  double running = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) {
    const double discount = std::pow(rho, static_cast<double>((t + 1) / 10));  // s = t+1, 1-based
    running += discount * squared_errors.col(t).sum();
    series[static_cast<size_t>(t)] = running;
  }
  return series;
}

}  // namespace cards
