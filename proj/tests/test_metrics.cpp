#include <doctest.h>

#include <cmath>

#include "cards/metrics.hpp"
#include "support/test_utils.hpp"

using namespace cards;

namespace {

Partition blocks(int p, int block) {
  Partition part;
  for (int start = 0; start < p; start += block) {
    std::vector<int> g;
    for (int j = start; j < std::min(p, start + block); ++j) g.push_back(j);
    part.groups.push_back(std::move(g));
  }
  return part;
}

}  // namespace

TEST_CASE("nmi reference values") {
  const Partition four = blocks(60, 15);
  CHECK(nmi(four, four, 60) == doctest::Approx(1.0).epsilon(1e-12));

  const Partition singles = blocks(60, 1);
  const double expected = 2.0 * std::log(4.0) / (std::log(60.0) + std::log(4.0));
  CHECK(nmi(singles, four, 60) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(nmi(singles, four, 60) == doctest::Approx(0.5059).epsilon(2e-4));

  Partition crossed_a, crossed_b;
  crossed_a.groups = {{0, 1}, {2, 3}};
  crossed_b.groups = {{0, 2}, {1, 3}};
  CHECK(nmi(crossed_a, crossed_b, 4) == doctest::Approx(0.0).epsilon(1e-12));

  // two trivial partitions compare as 1
  Partition one;
  one.groups = {{0, 1, 2}};
  CHECK(nmi(one, one, 3) == doctest::Approx(1.0));
}

TEST_CASE("nmi is symmetric, relabel-invariant and in [0,1]") {
  auto eng = testutil::rng(3);
  std::uniform_int_distribution<int> nblocks(1, 6);
  for (int t = 0; t < 50; ++t) {
    const int p = 12 + t % 9;
    auto random_partition = [&]() {
      Partition part;
      std::vector<int> perm(static_cast<size_t>(p));
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), eng);
      const int k = nblocks(eng);
      part.groups.assign(static_cast<size_t>(k), {});
      for (int j = 0; j < p; ++j) part.groups[static_cast<size_t>(j % k)].push_back(perm[static_cast<size_t>(j)]);
      return part;
    };
    const Partition C = random_partition();
    const Partition D = random_partition();
    const double ab = nmi(C, D, p);
    const double ba = nmi(D, C, p);
    CHECK(std::abs(ab - ba) < 1e-12);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(nmi(C, C, p) == doctest::Approx(1.0).epsilon(1e-12));

    Partition relabeled = C;
    std::reverse(relabeled.groups.begin(), relabeled.groups.end());
    CHECK(nmi(relabeled, D, p) == doctest::Approx(ab).epsilon(1e-12));
  }
}

TEST_CASE("nmi rejects mismatched universes and counts the zero group") {
  Partition a, b;
  a.groups = {{0, 1}};
  b.groups = {{0, 1, 2}};
  CHECK_THROWS_AS(nmi(a, b, 3), Error);

  Partition with_zero, plain;
  with_zero.groups = {{0, 1}};
  with_zero.zero_group = {2, 3};
  plain.groups = {{0, 1}, {2, 3}};
  CHECK(nmi(with_zero, plain, 4) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("prediction error estimates the noise floor") {
  auto eng = testutil::rng(15);
  const int p = 10, n_test = 20000;
  const Vector beta = testutil::random_vector(eng, p);
  const Matrix X_test = testutil::random_matrix(eng, n_test, p);
  const Vector noise = testutil::random_vector(eng, n_test);
  const Vector y_test = X_test * beta + noise;
  const double pe = prediction_error(beta, 0.0, X_test, y_test);
  CHECK(std::abs(pe - 1.0) < 3.0 * std::sqrt(2.0 / n_test));

  CHECK(prediction_error(beta, 0.0, X_test, Vector(X_test * beta)) == doctest::Approx(0.0));
}

TEST_CASE("false positives count exceedances outside the support") {
  Vector beta(5);
  beta << 1.0, 0.0, 0.2, 1e-9, -0.4;
  CHECK(false_positives(beta, {0, 2, 4}, 1e-6) == 0);
  CHECK(false_positives(beta, {0}, 1e-6) == 2);
  CHECK(false_positives(Vector::Zero(5), {}, 1e-6) == 0);
}

TEST_CASE("cumulative rss discounts by decade and never decreases") {
  Matrix errors = Matrix::Zero(2, 3);
  CHECK(cumulative_rss(errors, 0.95) == std::vector<double>{0.0, 0.0, 0.0});

  Matrix one(1, 1);
  one << 4.0;  // squared error already
  CHECK(cumulative_rss(one, 0.5)[0] == doctest::Approx(4.0));  // floor(1/10) = 0

  auto eng = testutil::rng(91);
  Matrix sq(3, 25);
  for (int i = 0; i < 3; ++i) {
    for (int t = 0; t < 25; ++t) sq(i, t) = std::abs(testutil::random_vector(eng, 1)[0]);
  }
  const auto plain = cumulative_rss(sq, 1.0);
  double running = 0.0;
  for (int t = 0; t < 25; ++t) {
    running += sq.col(t).sum();
    CHECK(plain[static_cast<size_t>(t)] == doctest::Approx(running).epsilon(1e-12));
  }
  const auto discounted = cumulative_rss(sq, 0.9);
  for (size_t t = 1; t < discounted.size(); ++t) CHECK(discounted[t] >= discounted[t - 1]);
  // after the first decade the discount kicks in
  CHECK(discounted[10] - discounted[9] ==
        doctest::Approx(0.9 * sq.col(10).sum()).epsilon(1e-12));
}
