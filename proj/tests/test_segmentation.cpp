#include <doctest.h>

#include <algorithm>
#include <set>

#include "cards/segmentation.hpp"
#include "support/test_utils.hpp"

using namespace cards;

namespace {
Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}
}  // namespace

TEST_CASE("rank_map sorts ascending with index tie-breaks") {
  CHECK(rank_map(vec({0.3, -1.2, 0.5})).order == std::vector<int>{1, 0, 2});
  CHECK(rank_map(vec({-1, 0, 1})).order == std::vector<int>{0, 1, 2});
  CHECK(rank_map(vec({1.0, 1.0})).order == std::vector<int>{0, 1});
}

TEST_CASE("build_segments cuts strictly above delta") {
  const Vector bt = vec({1.0, 1.05, 1.5, 1.52});
  const Segmentation seg = build_segments(bt, rank_map(bt), 0.2);
  REQUIRE(seg.segment_count() == 2);
  CHECK(seg.segments[0] == std::vector<int>{0, 1});
  CHECK(seg.segments[1] == std::vector<int>{2, 3});

  // delta = 0 with distinct values: one segment per coordinate
  const Vector distinct = vec({0.4, -0.3, 2.0, 1.1});
  const Segmentation fine = build_segments(distinct, rank_map(distinct), 0.0);
  CHECK(fine.segment_count() == 4);

  // delta >= range: a single segment
  const Segmentation coarse = build_segments(distinct, rank_map(distinct), 2.5);
  CHECK(coarse.segment_count() == 1);

  // a gap exactly equal to delta does not cut
  const Vector tie = vec({0.0, 0.2});
  CHECK(build_segments(tie, rank_map(tie), 0.2).segment_count() == 1);
}

TEST_CASE("build_segments_sparse separates exact zeros") {
  const Segmentation seg = build_segments_sparse(vec({0.0, 0.9, 1.0, 0.0}), 0.2);
  CHECK(seg.zero_set == std::vector<int>{0, 3});
  REQUIRE(seg.segment_count() == 1);
  CHECK(seg.segments[0] == std::vector<int>{1, 2});

  const Segmentation nz = build_segments_sparse(vec({0.5, 0.9}), 0.2);
  CHECK(nz.zero_set.empty());
  CHECK(nz.segment_count() == 2);

  try {
    build_segments_sparse(vec({0.0, 0.0}), 0.1);
    FAIL("expected AllZero");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AllZero);
  }
}

TEST_CASE("build_pair_graph covers the fused and exhaustive extremes") {
  const Vector bt = vec({0.0, 1.0, 2.0, 3.0, 4.0});
  const int p = 5;
  const Segmentation singletons = build_segments(bt, rank_map(bt), 0.0);
  const PairGraph fused = build_pair_graph(singletons, 1.0, 1.0);
  CHECK(fused.pairs.size() == static_cast<size_t>(p - 1));
  CHECK(std::all_of(fused.pairs.begin(), fused.pairs.end(),
                    [](const PenalizedPair& pr) { return pr.tier == PairTier::Between; }));

  const Segmentation one = build_segments(bt, rank_map(bt), 10.0);
  const PairGraph tv = build_pair_graph(one, 1.0, 1.0);
  CHECK(tv.pairs.size() == static_cast<size_t>(p * (p - 1) / 2));
  CHECK(std::all_of(tv.pairs.begin(), tv.pairs.end(),
                    [](const PenalizedPair& pr) { return pr.tier == PairTier::Within; }));

  // L = 2 with |B1| = |B2| = 2: 4 between pairs, 2 within pairs
  const Vector two = vec({0.0, 0.1, 1.0, 1.1});
  const PairGraph hybrid = build_pair_graph(build_segments(two, rank_map(two), 0.5), 1.0, 1.0);
  int between = 0, within = 0;
  for (const auto& pr : hybrid.pairs) (pr.tier == PairTier::Between ? between : within)++;
  CHECK(between == 4);
  CHECK(within == 2);
}

TEST_CASE("order_preserving tolerates a within-segment mis-ranking") {
  // true groups {tau(1),tau(2),tau(4)} and {tau(3)}: the ranking puts one
  // low-group index above the high one, but the segmentation absorbs it.
  const Vector beta_true = vec({0.0, 0.0, 2.0, 0.0});
  Segmentation seg;
  seg.segments = {{0, 1}, {2, 3}};
  CHECK(order_preserving(seg, beta_true));

  Segmentation sorted_singletons;
  sorted_singletons.segments = {{0}, {1}, {3}, {2}};
  CHECK(order_preserving(sorted_singletons, beta_true));

  Segmentation swapped;
  swapped.segments = {{0}, {2}, {1}, {3}};
  CHECK_FALSE(order_preserving(swapped, beta_true));

  // sparse variant: the zero set must be exactly null
  Segmentation sparse;
  sparse.segments = {{2}};
  sparse.zero_set = {0, 1, 3};
  CHECK(order_preserving(sparse, beta_true));
  sparse.zero_set = {0, 2, 3};
  sparse.segments = {{1}};
  CHECK_FALSE(order_preserving(sparse, beta_true));
}

TEST_CASE("jump_count counts adjacent true-value changes along the ranking") {
  RankMap tau;
  tau.order = {0, 1, 2, 3};
  CHECK(jump_count(tau, vec({0, 0, 1, 1})) == 1);
  CHECK(jump_count(tau, vec({0, 1, 0, 1})) == 3);
  CHECK(jump_count(tau, vec({2, 2, 2, 2})) == 0);
  RankMap four;
  four.order = {0, 1, 2, 3, 4, 5, 6, 7};
  CHECK(jump_count(four, vec({0, 0, 1, 1, 2, 2, 3, 3})) == 3);
}

TEST_CASE("segments partition the indices and concatenate monotonically") {
  auto eng = testutil::rng(9);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int t = 0; t < 40; ++t) {
    const int p = 2 + t % 17;
    Vector bt(p);
    for (int j = 0; j < p; ++j) bt[j] = unif(eng);
    const double delta = 0.15 * unif(eng);
    const Segmentation seg = build_segments(bt, rank_map(bt), delta);

    std::set<int> seen;
    double prev = -1e300;
    for (const auto& s : seg.segments) {
      REQUIRE(!s.empty());
      for (int j : s) {
        CHECK(seen.insert(j).second);
        CHECK(bt[j] >= prev);
        prev = bt[j];
      }
    }
    CHECK(static_cast<int>(seen.size()) == p);

    // coarsening: every segment at delta' >= delta is a union of consecutive
    // delta-segments
    const Segmentation coarse = build_segments(bt, rank_map(bt), delta * 2.0 + 0.01);
    size_t fine_idx = 0;
    for (const auto& cs : coarse.segments) {
      size_t consumed = 0;
      while (consumed < cs.size()) {
        REQUIRE(fine_idx < seg.segments.size());
        const auto& fs = seg.segments[fine_idx++];
        for (size_t k = 0; k < fs.size(); ++k) {
          REQUIRE(consumed + k < cs.size());
          CHECK(cs[consumed + k] == fs[k]);
        }
        consumed += fs.size();
      }
    }
  }
}

TEST_CASE("order-preserving segmentations intersect true groups in consecutive runs") {
  auto eng = testutil::rng(77);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int checked = 0;
  for (int t = 0; t < 200 && checked < 40; ++t) {
    const int K = 2 + t % 3;
    const int per = 2 + t % 4;
    const int p = K * per;
    Vector beta_true(p);
    Partition truth;
    for (int k = 0; k < K; ++k) {
      std::vector<int> g;
      for (int j = k * per; j < (k + 1) * per; ++j) {
        beta_true[j] = static_cast<double>(k);
        g.push_back(j);
      }
      truth.groups.push_back(g);
    }
    Vector bt = beta_true;
    for (int j = 0; j < p; ++j) bt[j] += 0.8 * (unif(eng) - 0.5);
    const Segmentation seg = build_segments(bt, rank_map(bt), 0.25 * unif(eng));
    if (!order_preserving(seg, beta_true)) continue;
    ++checked;

    for (const auto& g : truth.groups) {
      std::vector<int> hits;  // segment ids meeting this group
      for (int l = 0; l < seg.segment_count(); ++l) {
        for (int j : seg.segments[static_cast<size_t>(l)]) {
          if (std::find(g.begin(), g.end(), j) != g.end()) {
            hits.push_back(l);
            break;
          }
        }
      }
      REQUIRE(!hits.empty());
      for (size_t i = 1; i < hits.size(); ++i) CHECK(hits[i] == hits[i - 1] + 1);
      // interior segments of the run lie wholly inside the group
      for (size_t i = 1; i + 1 < hits.size(); ++i) {
        for (int j : seg.segments[static_cast<size_t>(hits[i])]) {
          CHECK(std::find(g.begin(), g.end(), j) != g.end());
        }
      }
    }
    const PairGraph graph = build_pair_graph(seg, 1.0, 1.0);
    CHECK(graph.pairs.size() <= static_cast<size_t>(p * (p - 1) / 2));
    if (seg.segment_count() == 1) {
      CHECK(graph.pairs.size() == static_cast<size_t>(p * (p - 1) / 2));
    }
  }
  CHECK(checked >= 40);
}
