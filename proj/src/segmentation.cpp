#include "cards/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cards {

RankMap rank_map(const Vector& beta_tilde) {
  if (!beta_tilde.allFinite()) {
    throw Error(ErrorCode::BadArgument, "rank_map: non-finite preliminary estimate");
  }
  RankMap tau;
  tau.order.resize(static_cast<size_t>(beta_tilde.size()));
  std::iota(tau.order.begin(), tau.order.end(), 0);
  std::stable_sort(tau.order.begin(), tau.order.end(),
                   [&](int a, int b) { return beta_tilde[a] < beta_tilde[b]; });
  return tau;
}

Segmentation build_segments(const Vector& beta_tilde, const RankMap& tau, double delta) {
  if (delta < 0.0) throw Error(ErrorCode::BadArgument, "delta must be >= 0");
  Segmentation seg;
  seg.delta = delta;
  const int p = static_cast<int>(tau.order.size());
  if (p == 0) return seg;
  std::vector<int> current{tau.order[0]};
  for (int j = 1; j < p; ++j) {
    const double gap = beta_tilde[tau.order[j]] - beta_tilde[tau.order[j - 1]];
    if (gap > delta) {
      seg.segments.push_back(std::move(current));
      current.clear();
    }
    current.push_back(tau.order[j]);
  }
  seg.segments.push_back(std::move(current));
  return seg;
}

Segmentation build_segments_sparse(const Vector& beta_tilde, double delta) {
  if (delta < 0.0) throw Error(ErrorCode::BadArgument, "delta must be >= 0");
  const int p = static_cast<int>(beta_tilde.size());
  std::vector<int> zero_set, support;
  for (int j = 0; j < p; ++j) {
    (beta_tilde[j] == 0.0 ? zero_set : support).push_back(j);
  }
  if (support.empty()) {
    throw Error(ErrorCode::AllZero, "preliminary estimate is identically zero");
  }
  Vector sub(static_cast<Eigen::Index>(support.size()));
  for (size_t k = 0; k < support.size(); ++k) sub[static_cast<Eigen::Index>(k)] = beta_tilde[support[k]];
  Segmentation seg = build_segments(sub, rank_map(sub), delta);
  for (auto& s : seg.segments) {
    for (int& idx : s) idx = support[static_cast<size_t>(idx)];
  }
  seg.zero_set = std::move(zero_set);
  return seg;
}

PairGraph build_pair_graph(const Segmentation& seg, double lambda1, double lambda2) {
  if (lambda1 < 0.0 || lambda2 < 0.0) {
    throw Error(ErrorCode::BadArgument, "pair-graph lambdas must be >= 0");
  }
  PairGraph g;
  g.lambda_between = lambda1;
  g.lambda_within = lambda2;
  const auto& segs = seg.segments;
  for (size_t l = 0; l + 1 < segs.size(); ++l) {
    for (int i : segs[l]) {
      for (int j : segs[l + 1]) {
        g.pairs.push_back({std::min(i, j), std::max(i, j), PairTier::Between});
      }
    }
  }
  for (const auto& s : segs) {
    for (size_t a = 0; a < s.size(); ++a) {
      for (size_t b = a + 1; b < s.size(); ++b) {
        g.pairs.push_back({std::min(s[a], s[b]), std::max(s[a], s[b]), PairTier::Within});
      }
    }
  }
  return g;
}

bool order_preserving(const Segmentation& seg, const Vector& beta_true) {
  for (int j : seg.zero_set) {
    if (beta_true[j] != 0.0) return false;
  }
  double prev_max = -std::numeric_limits<double>::infinity();
  for (const auto& s : seg.segments) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int j : s) {
      lo = std::min(lo, beta_true[j]);
      hi = std::max(hi, beta_true[j]);
    }
    if (lo < prev_max) return false;
    prev_max = hi;
  }
  return true;
}

double default_delta(const Vector& beta_tilde) {
  if (beta_tilde.size() < 2) return 0.0;
  Vector sorted = beta_tilde;
  std::sort(sorted.data(), sorted.data() + sorted.size());
  std::vector<double> gaps;
  gaps.reserve(static_cast<size_t>(sorted.size() - 1));
  for (Eigen::Index j = 0; j + 1 < sorted.size(); ++j) gaps.push_back(sorted[j + 1] - sorted[j]);
  std::sort(gaps.begin(), gaps.end());
  return gaps[gaps.size() / 2];
}

int jump_count(const RankMap& tau, const Vector& beta_true) {
  int jumps = 0;
  for (size_t j = 0; j + 1 < tau.order.size(); ++j) {
    if (beta_true[tau.order[j]] != beta_true[tau.order[j + 1]]) ++jumps;
  }
  return jumps;
}

}  // namespace cards
